#include "rnse/rnsf.hpp"

#include <bit>
#include <cstring>
#include <fstream>
#include <vector>

#include "rnse/error.hpp"
#include "rnse/fft.hpp"

namespace rnse {
namespace {

static_assert(std::endian::native == std::endian::little,
              "RNSF I/O writes host byte order and assumes a little-endian host");

template <class T>
void put(std::ofstream& os, T v) {
  os.write(reinterpret_cast<const char*>(&v), sizeof(T));
}

template <class T>
T get(std::ifstream& is, const std::string& what) {
  T v{};
  is.read(reinterpret_cast<char*>(&v), sizeof(T));
  if (!is) throw FormatError("RNSF: truncated header (" + what + ")");
  return v;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw FormatError("RNSF: cannot open " + path.string() + " for writing");
  return os;
}

void write_header(std::ofstream& os, const GridSpec& g, std::uint8_t domain) {
  os.write("RNSF", 4);
  put<std::uint32_t>(os, kRnsfVersion);
  put<std::uint32_t>(os, static_cast<std::uint32_t>(g.n));
  put<double>(os, g.box_length);
  put<std::uint32_t>(os, 3);
  put<std::uint8_t>(os, domain);
}

void write_meta(const std::filesystem::path& path, const GridSpec& g, bool spectral,
                bool mean_free, bool div_free, const nlohmann::json& extra) {
  nlohmann::json meta;
  meta["grid"] = {{"n", g.n}, {"box_length", g.box_length}, {"dealias_fraction", g.dealias_fraction}};
  meta["domain"] = spectral ? "spectral" : "physical";
  meta["mean_free"] = mean_free;
  meta["div_free"] = div_free;
  meta["extra"] = extra;
  std::ofstream os(sidecar_path(path));
  if (!os) throw FormatError("RNSF: cannot write sidecar for " + path.string());
  os << meta.dump(2) << "\n";
}

}  // namespace

std::filesystem::path sidecar_path(const std::filesystem::path& path) {
  return std::filesystem::path(path.string() + ".meta.json");
}

void write_rnsf(const std::filesystem::path& path, const SpectralField& f,
                const nlohmann::json& extra) {
  require(f.ncomp() == 3, "RNSF: only 3-component fields are stored");
  auto os = open_out(path);
  write_header(os, f.grid(), 1);
  for (const Complex& c : f.coeffs()) {
    put<double>(os, c.real());
    put<double>(os, c.imag());
  }
  if (!os) throw FormatError("RNSF: write failed for " + path.string());
  write_meta(path, f.grid(), true, f.mean_free(), f.div_free(), extra);
}

void write_rnsf(const std::filesystem::path& path, const PhysicalField& u,
                const nlohmann::json& extra) {
  require(u.ncomp() == 3, "RNSF: only 3-component fields are stored");
  auto os = open_out(path);
  write_header(os, u.grid(), 0);
  for (double v : u.samples()) put<double>(os, v);
  if (!os) throw FormatError("RNSF: write failed for " + path.string());
  write_meta(path, u.grid(), false, false, false, extra);
}

AnyField read_rnsf(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw FormatError("RNSF: cannot open " + path.string());
  char magic[4] = {};
  is.read(magic, 4);
  if (!is || std::memcmp(magic, "RNSF", 4) != 0)
    throw FormatError("RNSF: bad magic in " + path.string());
  const auto version = get<std::uint32_t>(is, "version");
  if (version != kRnsfVersion) throw FormatError("RNSF: unsupported version " + std::to_string(version));
  const auto n = get<std::uint32_t>(is, "n");
  const auto L = get<double>(is, "box_length");
  const auto ncomp = get<std::uint32_t>(is, "ncomp");
  const auto domain = get<std::uint8_t>(is, "domain");
  if (ncomp != 3) throw FormatError("RNSF: ncomp must be 3");
  if (domain > 1) throw FormatError("RNSF: unknown domain flag");

  GridSpec g;
  g.n = static_cast<int>(n);
  g.box_length = L;
  nlohmann::json meta;
  if (std::ifstream ms(sidecar_path(path)); ms) {
    try {
      ms >> meta;
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("RNSF: unreadable sidecar: ") + e.what());
    }
    if (meta.contains("grid")) g.dealias_fraction = meta["grid"].value("dealias_fraction", g.dealias_fraction);
  }
  try {
    g.validate();
  } catch (const ValidationError& e) {
    throw FormatError(std::string("RNSF: header describes an invalid grid: ") + e.what());
  }

  if (domain == 0) {
    PhysicalField u(g, 3);
    for (double& v : u.samples()) v = get<double>(is, "payload");
    return u;
  }
  SpectralField f(g, 3);
  for (Complex& c : f.coeffs()) {
    const double re = get<double>(is, "payload");
    const double im = get<double>(is, "payload");
    c = Complex(re, im);
  }
  f.set_mean_free(meta.value("mean_free", false));
  f.set_div_free(meta.value("div_free", false));
  return f;
}

SpectralField read_rnsf_spectral(const std::filesystem::path& path) {
  AnyField any = read_rnsf(path);
  if (auto* s = std::get_if<SpectralField>(&any)) return std::move(*s);
  return to_spectral(std::get<PhysicalField>(any));
}

}  // namespace rnse
