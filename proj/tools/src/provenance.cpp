#include "wipet_cli/provenance.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstdio>
#include "json.hpp"
#include <stdexcept>

#include "wipet/io.hpp"

namespace wipet::cli {

std::string sha256_hex(const std::string& text) {
  std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
  unsigned int len = 0;
  if (EVP_Digest(text.data(), text.size(), digest.data(), &len, EVP_sha256(), nullptr) != 1) {
    throw std::runtime_error("SHA-256 failed");
  }
  std::string hex;
  char buf[3];
  for (unsigned int i = 0; i < len; ++i) {
    std::snprintf(buf, sizeof buf, "%02x", digest[i]);
    hex += buf;
  }
  return hex;
}

void write_provenance(const std::filesystem::path& file, const std::string& command, const std::string& config_hash,
                      std::uint64_t seed) {
  nlohmann::ordered_json j;
  j["tool"] = "wipet";
  j["version"] = WIPET_VERSION;
  j["command"] = command;
  j["file"] = file.filename().string();
  j["config_sha256"] = config_hash;
  j["seed"] = seed;
  std::filesystem::path side = file;
  side += ".prov.json";
  io::atomic_write(side, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
}

}  // namespace wipet::cli
