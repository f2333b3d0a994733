#include <atomic>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <thread>

#include "palinscan/error.hpp"
#include "palinscan/seqio.hpp"

#ifdef PALINSCAN_HAVE_OPENSSL
#define CPPHTTPLIB_OPENSSL_SUPPORT
#endif
#include "httplib.h"

namespace palinscan {

namespace fs = std::filesystem;

fs::path resolve_cache_dir(const fs::path& fallback) {
  if (const char* env = std::getenv("PALINSCAN_CACHE"); env != nullptr && *env != '\0')
    return fs::path(env);
  return fallback;
}

namespace {

bool valid_accession(const std::string& acc) {
  if (acc.empty() || acc.size() > 128) return false;
  for (char c : acc) {
    const bool ok = std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-';
    if (!ok) return false;
  }
  return acc != "." && acc != "..";
}

struct SplitUrl {
  std::string origin;  // scheme://host[:port]
  std::string path;    // everything after the origin, may be empty
};

SplitUrl split_url(const std::string& url) {
  const auto scheme_end = url.find("://");
  if (scheme_end == std::string::npos)
    fail(ErrorCode::InvalidArgument, "endpoint must be an absolute URL: " + url);
  const auto path_start = url.find('/', scheme_end + 3);
  if (path_start == std::string::npos) return {url, "/"};
  return {url.substr(0, path_start), url.substr(path_start)};
}

FastaRecord first_record(const std::string& body, const std::string& accession) {
  std::vector<FastaRecord> records;
  try {
    records = parse_fasta(body);
  } catch (const Error& e) {
    fail(ErrorCode::Parse, "malformed response body for " + accession + ": " + e.what());
  }
  return std::move(records.front());
}

void write_atomically(const fs::path& target, const std::string& body) {
  static std::atomic<unsigned> counter{0};
  std::ostringstream suffix;
  suffix << ".tmp." << std::hash<std::thread::id>{}(std::this_thread::get_id()) << '.'
         << counter.fetch_add(1);
  const fs::path tmp = target.string() + suffix.str();
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) fail(ErrorCode::Io, "cannot write cache file " + tmp.string());
    out << body;
    if (!out) fail(ErrorCode::Io, "short write to cache file " + tmp.string());
  }
  std::error_code ec;
  fs::rename(tmp, target, ec);
  if (ec) {
    fs::remove(tmp, ec);
    fail(ErrorCode::Io, "cannot move cache file into place: " + target.string());
  }
}

}  // namespace

FastaRecord fetch_sequence(const std::string& accession, const std::string& endpoint,
                           const fs::path& cache_dir) {
  if (!valid_accession(accession))
    fail(ErrorCode::InvalidArgument, "invalid accession '" + accession + "'");

  const fs::path cached = cache_dir / (accession + ".fasta");
  if (fs::exists(cached)) {
    std::ifstream in(cached, std::ios::binary);
    std::stringstream buf;
    buf << in.rdbuf();
    return first_record(buf.str(), accession);
  }

  const SplitUrl url = split_url(endpoint);
  httplib::Client client(url.origin);
  client.set_connection_timeout(10);
  client.set_read_timeout(60);
  client.set_follow_location(true);
  auto res = client.Get(url.path + accession);
  if (!res)
    fail(ErrorCode::Network, "request for " + accession + " failed: " + httplib::to_string(res.error()));
  if (res->status == 404)
    fail(ErrorCode::NotFound, "accession " + accession + " not found");
  if (res->status != 200)
    fail(ErrorCode::Network,
         "request for " + accession + " returned HTTP " + std::to_string(res->status));

  FastaRecord record = first_record(res->body, accession);
  std::error_code ec;
  fs::create_directories(cache_dir, ec);
  if (ec) fail(ErrorCode::Io, "cannot create cache directory " + cache_dir.string());
  write_atomically(cached, res->body);
  return record;
}

}  // namespace palinscan
