#include "radmaxlab/grid_io.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

namespace radmaxlab::dyadic {

static_assert(std::endian::native == std::endian::little, "binary grid format assumes a little-endian host");

namespace {

template <class T>
void put(std::ostream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof v);
}

template <class T>
T get(std::istream& is) {
  T v{};
  if (!is.read(reinterpret_cast<char*>(&v), sizeof v)) throw InvalidInput("truncated grid file");
  return v;
}

bool ends_with(const std::string& s, const std::string& suffix) {
  return s.size() >= suffix.size() && s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

}  // namespace

void write_csv(std::ostream& os, const GridFunction& u) {
  const Grid& g = u.grid();
  os << "# n=" << g.n() << " J=" << g.J() << " ncomp=" << g.ncomp()
     << " space=" << g.space().to_string() << "\n";
  os << "cell,component,coordinate,real,imag\n";
  os.precision(17);
  for (std::int64_t c = 0; c < g.cells(); ++c)
    for (int k = 0; k < g.ncomp(); ++k)
      for (int i = 0; i < g.coords(); ++i) {
        const cplx v = u(c, k, i);
        os << c << ',' << k << ',' << i << ',' << v.real() << ',' << v.imag() << '\n';
      }
}

GridFunction read_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("# ", 0) != 0) throw InvalidInput("missing grid header");
  int n = 0, J = -1, ncomp = 0;
  std::string space;
  std::istringstream hs(line.substr(2));
  std::string tok;
  while (hs >> tok) {
    const auto eq = tok.find('=');
    if (eq == std::string::npos) throw InvalidInput("malformed grid header");
    const std::string key = tok.substr(0, eq), val = tok.substr(eq + 1);
    if (key == "n") n = std::stoi(val);
    else if (key == "J") J = std::stoi(val);
    else if (key == "ncomp") ncomp = std::stoi(val);
    else if (key == "space") space = val;
  }
  if (space.empty()) throw InvalidInput("grid header lacks a space");
  GridFunction u(Grid(n, J, ncomp, banach::SpaceDescriptor::parse(space)));
  if (!std::getline(is, line)) throw InvalidInput("missing column header");
  std::int64_t rows = 0;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::istringstream rs(line);
    std::int64_t c;
    int k, i;
    double re, im;
    char s1, s2, s3, s4;
    if (!(rs >> c >> s1 >> k >> s2 >> i >> s3 >> re >> s4 >> im))
      throw InvalidInput("malformed grid row: " + line);
    const Grid& g = u.grid();
    if (c < 0 || c >= g.cells() || k < 0 || k >= g.ncomp() || i < 0 || i >= g.coords())
      throw InvalidInput("grid row out of range: " + line);
    u(c, k, i) = cplx(re, im);
    ++rows;
  }
  if (rows != u.values().size()) throw InvalidInput("grid file has the wrong number of rows");
  return u;
}

void write_binary(std::ostream& os, const GridFunction& u) {
  const Grid& g = u.grid();
  os.write("RMLG", 4);
  put<std::uint32_t>(os, 1);
  put<std::int32_t>(os, g.n());
  put<std::int32_t>(os, g.J());
  put<std::int32_t>(os, g.ncomp());
  const std::string spec = g.space().to_string();
  put<std::uint32_t>(os, static_cast<std::uint32_t>(spec.size()));
  os.write(spec.data(), static_cast<std::streamsize>(spec.size()));
  for (Eigen::Index j = 0; j < u.values().size(); ++j) {
    put<double>(os, u.values()[j].real());
    put<double>(os, u.values()[j].imag());
  }
}

GridFunction read_binary(std::istream& is) {
  char magic[4];
  if (!is.read(magic, 4) || std::memcmp(magic, "RMLG", 4) != 0) throw InvalidInput("not a grid file");
  if (get<std::uint32_t>(is) != 1) throw InvalidInput("unsupported grid file version");
  const int n = get<std::int32_t>(is), J = get<std::int32_t>(is), ncomp = get<std::int32_t>(is);
  const auto len = get<std::uint32_t>(is);
  if (len > 256) throw InvalidInput("malformed space spec");
  std::string spec(len, '\0');
  if (!is.read(spec.data(), len)) throw InvalidInput("truncated grid file");
  GridFunction u(Grid(n, J, ncomp, banach::SpaceDescriptor::parse(spec)));
  for (Eigen::Index j = 0; j < u.values().size(); ++j) {
    const double re = get<double>(is);
    const double im = get<double>(is);
    u.values()[j] = cplx(re, im);
  }
  return u;
}

void save(const std::string& path, const GridFunction& u) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw InvalidInput("cannot open " + path);
  if (ends_with(path, ".csv")) write_csv(os, u);
  else write_binary(os, u);
}

GridFunction load(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw InvalidInput("cannot open " + path);
  return ends_with(path, ".csv") ? read_csv(is) : read_binary(is);
}

}  // namespace radmaxlab::dyadic
