#include "qmpemba/cache.hpp"

#include <array>
#include <charconv>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>
#include <openssl/evp.h>

#include "qmpemba/io.hpp"

namespace qmpemba {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// Hex-float text, so every bit of the input reaches the key.
std::string exact(double x) {
  std::array<char, 64> buf{};
  const auto [ptr, ec] =
      std::to_chars(buf.data(), buf.data() + buf.size(), x, std::chars_format::hex);
  if (ec != std::errc()) throw std::runtime_error("cache key: float conversion failed");
  return std::string(buf.data(), ptr);
}

std::string sha256_hex(const std::string& text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), md.data(), &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("cache key: SHA-256 failed");
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out += digits[md[i] >> 4];
    out += digits[md[i] & 15];
  }
  return out;
}

json complex_json(Complex z) { return json::array({z.real(), z.imag()}); }

Complex complex_from(const json& j) { return {j.at(0).get<double>(), j.at(1).get<double>()}; }

json gap_json(const GapReport& g) {
  return {{"lambda2", complex_json(g.lambda2)},
          {"lambda3", complex_json(g.lambda3)},
          {"tau2", g.tau2},
          {"tau3", g.tau3},
          {"ratio", g.ratio},
          {"gap_is_complex", g.gap_is_complex},
          {"degenerate_gap", g.degenerate_gap},
          {"multiplicity", g.multiplicity},
          {"index2", g.index2},
          {"index3", g.index3},
          {"restricted", g.restricted},
          {"unclassified_skipped", g.unclassified_skipped}};
}

GapReport gap_from(const json& j) {
  GapReport g;
  g.lambda2 = complex_from(j.at("lambda2"));
  g.lambda3 = complex_from(j.at("lambda3"));
  g.tau2 = j.at("tau2").get<double>();
  g.tau3 = j.at("tau3").get<double>();
  g.ratio = j.at("ratio").get<double>();
  g.gap_is_complex = j.at("gap_is_complex").get<bool>();
  g.degenerate_gap = j.at("degenerate_gap").get<bool>();
  g.multiplicity = j.at("multiplicity").get<int>();
  g.index2 = j.at("index2").get<std::size_t>();
  g.index3 = j.at("index3").get<std::size_t>();
  g.restricted = j.at("restricted").get<bool>();
  g.unclassified_skipped = j.at("unclassified_skipped").get<int>();
  return g;
}

}  // namespace

CacheKey spectral_cache_key(const ChainParams& p) {
  std::ostringstream os;
  os << kCacheVersionTag << "|n_spins=" << p.n_spins << "|omega=" << exact(p.omega)
     << "|v=" << exact(p.v) << "|alpha=" << exact(p.alpha) << "|gamma=" << exact(p.gamma)
     << "|boundary=open";
  CacheKey key;
  key.canonical = os.str();
  key.digest = sha256_hex(key.canonical);
  return key;
}

SpectrumCache::SpectrumCache(fs::path directory) : dir_(std::move(directory)) {
  fs::create_directories(dir_);
}

fs::path SpectrumCache::entry_path(const CacheKey& key) const {
  return dir_ / (key.digest + ".json");
}

std::optional<CellSpectrum> SpectrumCache::lookup(const CacheKey& key) {
  const fs::path path = entry_path(key);
  std::error_code ec;
  if (!fs::exists(path, ec)) {
    ++misses_;
    return std::nullopt;
  }
  try {
    const json j = json::parse(read_text(path));
    if (j.at("version").get<std::string>() != kCacheVersionTag)
      throw std::runtime_error("version mismatch");
    if (j.at("canonical").get<std::string>() != key.canonical)
      throw std::runtime_error("key mismatch");
    CellSpectrum out;
    out.status = CellStatus::ok;
    out.gap = gap_from(j.at("gap"));
    const long d = j.at("dim").get<long>();
    const auto& re = j.at("l2_re");
    const auto& im = j.at("l2_im");
    if (d <= 0 || re.size() != static_cast<std::size_t>(d * d) || im.size() != re.size())
      throw std::runtime_error("mode size mismatch");
    out.l2.resize(d, d);
    for (long k = 0; k < d * d; ++k)
      out.l2.data()[k] = Complex(re[static_cast<std::size_t>(k)].get<double>(),
                                 im[static_cast<std::size_t>(k)].get<double>());
    ++hits_;
    return out;
  } catch (const std::exception& e) {
    ++warnings_;
    ++misses_;
    std::cerr << "warning: ignoring corrupt cache entry " << path.string() << " (" << e.what()
              << ")\n";
    return std::nullopt;
  }
}

void SpectrumCache::store(const CacheKey& key, const CellSpectrum& payload) {
  if (payload.status != CellStatus::ok) return;
  json j;
  j["version"] = kCacheVersionTag;
  j["canonical"] = key.canonical;
  j["gap"] = gap_json(payload.gap);
  const long d = payload.l2.rows();
  j["dim"] = d;
  std::vector<double> re(static_cast<std::size_t>(d * d)), im(re.size());
  for (long k = 0; k < d * d; ++k) {
    re[static_cast<std::size_t>(k)] = payload.l2.data()[k].real();
    im[static_cast<std::size_t>(k)] = payload.l2.data()[k].imag();
  }
  j["l2_re"] = re;
  j["l2_im"] = im;
  const std::string text = j.dump();

  const fs::path path = entry_path(key);
  std::ostringstream tmp_name;
  tmp_name << key.digest << ".tmp." << std::this_thread::get_id();
  const fs::path tmp = dir_ / tmp_name.str();
  std::lock_guard<std::mutex> lock(write_mutex_);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cache: cannot write " + tmp.string());
    out << text;
  }
  fs::rename(tmp, path);
}

}  // namespace qmpemba
