#include "palinscan/seqio.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "palinscan/error.hpp"

namespace palinscan {

DnaSeq DnaSeq::clean(std::string_view raw, std::string source_id) {
  DnaSeq s;
  s.source_id_ = std::move(source_id);
  s.bases_.reserve(raw.size());
  for (char c : raw) {
    if (std::isspace(static_cast<unsigned char>(c))) continue;
    const char up = static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
    if (base_index(up) >= 0)
      s.bases_.push_back(up);
    else
      ++s.dropped_;
  }
  return s;
}

DnaSeq DnaSeq::from_bases(std::string bases, std::string source_id) {
  for (char c : bases)
    if (base_index(c) < 0)
      fail(ErrorCode::InvalidArgument, std::string("invalid base '") + c + "'");
  DnaSeq s;
  s.bases_ = std::move(bases);
  s.source_id_ = std::move(source_id);
  return s;
}

void DnaSeq::overwrite(std::size_t pos, std::string_view pattern) {
  if (pos + pattern.size() > bases_.size())
    fail(ErrorCode::InvalidArgument, "overwrite past end of sequence");
  for (char c : pattern)
    if (base_index(c) < 0) fail(ErrorCode::InvalidArgument, "overwrite: invalid base");
  std::copy(pattern.begin(), pattern.end(), bases_.begin() + static_cast<std::ptrdiff_t>(pos));
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

}  // namespace

std::vector<FastaRecord> parse_fasta(std::istream& in) {
  std::vector<FastaRecord> records;
  std::string id;
  std::string raw;
  bool in_record = false;
  bool saw_anything = false;

  auto flush = [&] {
    DnaSeq seq = DnaSeq::clean(raw, id);
    if (seq.length() == 0)
      fail(ErrorCode::Parse, "FASTA record '" + id + "' has no valid bases");
    records.push_back({id, std::move(seq)});
    raw.clear();
  };

  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (trim(line).empty()) continue;
    saw_anything = true;
    if (line.front() == '>') {
      if (in_record) flush();
      // The id is the first whitespace-delimited token of the header.
      std::string header = trim(std::string_view(line).substr(1));
      id = header.substr(0, header.find_first_of(" \t"));
      if (id.empty()) fail(ErrorCode::Parse, "FASTA header with empty id");
      in_record = true;
    } else if (line.front() == ';') {
      continue;
    } else {
      if (!in_record) fail(ErrorCode::Parse, "sequence data before first FASTA header");
      raw += line;
    }
  }
  if (!saw_anything) fail(ErrorCode::Parse, "empty FASTA input");
  if (in_record) flush();
  return records;
}

std::vector<FastaRecord> parse_fasta(std::string_view text) {
  std::istringstream in{std::string(text)};
  return parse_fasta(in);
}

std::vector<FastaRecord> read_fasta_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::Io, "cannot open FASTA file " + path.string());
  return parse_fasta(in);
}

std::string format_fasta(const std::vector<FastaRecord>& records, std::size_t width) {
  if (width == 0) width = 60;
  std::string out;
  for (const auto& r : records) {
    out += '>';
    out += r.id;
    out += '\n';
    const auto& b = r.seq.bases();
    for (std::size_t i = 0; i < b.size(); i += width) {
      out.append(b, i, width);
      out += '\n';
    }
  }
  return out;
}

DnaSeq reverse_complement(const DnaSeq& s) {
  std::string out(s.length(), 'A');
  const auto& b = s.bases();
  for (std::size_t i = 0; i < b.size(); ++i) out[b.size() - 1 - i] = complement(b[i]);
  return DnaSeq::from_bases(std::move(out), s.source_id());
}

}  // namespace palinscan
