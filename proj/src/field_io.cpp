#include "rigidlim/field_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <iomanip>

namespace rigidlim {

static_assert(std::endian::native == std::endian::little, "field dumps assume a little-endian host");

namespace {

constexpr char kMagic[4] = {'R', 'G', 'L', 'M'};

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}
template <class T>
T get(std::ifstream& is) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw Error("field dump: truncated header");
  return v;
}

void write_dump(const std::string& path, const Grid2D& g, const std::vector<const std::vector<double>*>& comps) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw Error("cannot open " + path);
  os.write(kMagic, 4);
  put<std::uint32_t>(os, FieldDump::kVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n()));
  put<double>(os, g.side());
  put<std::uint32_t>(os, static_cast<std::uint32_t>(comps.size()));
  for (const auto* c : comps) os.write(reinterpret_cast<const char*>(c->data()), c->size() * sizeof(double));
  if (!os) throw Error("write failed: " + path);
}

}  // namespace

void write_field_dump(const std::string& path, const ScalarField2D& f) { write_dump(path, f.grid(), {&f.data()}); }

void write_field_dump(const std::string& path, const VectorField2D& v) {
  write_dump(path, v.grid(), {&v.u_data(), &v.v_data()});
}

FieldDump read_field_dump(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw Error("cannot open " + path);
  char magic[4];
  is.read(magic, 4);
  if (!is || std::memcmp(magic, kMagic, 4) != 0) throw Error("field dump: bad magic in " + path);
  FieldDump d;
  const auto version = get<std::uint32_t>(is);
  if (version != FieldDump::kVersion) throw Error("field dump: unsupported version");
  d.n = get<std::uint32_t>(is);
  d.side = get<double>(is);
  const auto ncomp = get<std::uint32_t>(is);
  const std::size_t count = static_cast<std::size_t>(d.n) * d.n;
  d.components.assign(ncomp, std::vector<double>(count));
  for (auto& c : d.components) {
    is.read(reinterpret_cast<char*>(c.data()), count * sizeof(double));
    if (!is) throw Error("field dump: truncated payload");
  }
  return d;
}

void write_field_csv(const std::string& path, const VectorField2D& v) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << "x,y,u_x,u_y\n" << std::setprecision(17);
  const Grid2D& g = v.grid();
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const Vec2 p = g.center(i, j), c = v.center_value(i, j);
      os << p.x << ',' << p.y << ',' << c.x << ',' << c.y << '\n';
    }
}

void write_field_csv(const std::string& path, const ScalarField2D& f) {
  std::ofstream os(path);
  if (!os) throw Error("cannot open " + path);
  os << "x,y,value\n" << std::setprecision(17);
  const Grid2D& g = f.grid();
  for (int j = 0; j < g.n(); ++j)
    for (int i = 0; i < g.n(); ++i) {
      const Vec2 p = g.center(i, j);
      os << p.x << ',' << p.y << ',' << f(i, j) << '\n';
    }
}

}  // namespace rigidlim
