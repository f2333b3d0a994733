#pragma once

#include <cstddef>
#include <filesystem>
#include <istream>
#include <string>
#include <string_view>
#include <vector>

namespace palinscan {

/// Letter index in the fixed alphabet order A, C, G, T; -1 for anything else.
constexpr int base_index(char c) noexcept {
  switch (c) {
    case 'A': return 0;
    case 'C': return 1;
    case 'G': return 2;
    case 'T': return 3;
    default: return -1;
  }
}

constexpr char index_base(int i) noexcept { return "ACGT"[i & 3]; }

/// Index of the complementary letter: A<->T, C<->G.
constexpr int complement_index(int i) noexcept { return 3 - i; }

constexpr char complement(char c) noexcept {
  switch (c) {
    case 'A': return 'T';
    case 'C': return 'G';
    case 'G': return 'C';
    case 'T': return 'A';
    default: return 'N';
  }
}

/// A sequence over {A,C,G,T}. Construction either cleans raw text
/// (upper-cases, deletes and counts non-ACGT symbols) or validates.
class DnaSeq {
 public:
  DnaSeq() = default;

  static DnaSeq clean(std::string_view raw, std::string source_id = {});
  /// Throws InvalidArgument if any symbol is outside {A,C,G,T}.
  static DnaSeq from_bases(std::string bases, std::string source_id = {});

  const std::string& bases() const noexcept { return bases_; }
  std::size_t length() const noexcept { return bases_.size(); }
  const std::string& source_id() const noexcept { return source_id_; }
  std::size_t dropped_count() const noexcept { return dropped_; }
  char operator[](std::size_t i) const noexcept { return bases_[i]; }

  /// Overwrites [pos, pos + pattern.size()) keeping the alphabet invariant.
  void overwrite(std::size_t pos, std::string_view pattern);

  friend bool operator==(const DnaSeq&, const DnaSeq&) = default;

 private:
  std::string bases_;
  std::string source_id_;
  std::size_t dropped_ = 0;
};

struct FastaRecord {
  std::string id;
  DnaSeq seq;
};

std::vector<FastaRecord> parse_fasta(std::istream& in);
std::vector<FastaRecord> parse_fasta(std::string_view text);
std::vector<FastaRecord> read_fasta_file(const std::filesystem::path& path);

/// Writes records with sequence lines wrapped at `width` columns.
std::string format_fasta(const std::vector<FastaRecord>& records, std::size_t width = 60);

DnaSeq reverse_complement(const DnaSeq& s);

/// Cache directory for fetched accessions: $PALINSCAN_CACHE when set,
/// otherwise `fallback`.
std::filesystem::path resolve_cache_dir(const std::filesystem::path& fallback);

inline constexpr const char* kDefaultEndpoint =
    "https://eutils.ncbi.nlm.nih.gov/entrez/eutils/efetch.fcgi?db=nuccore&rettype=fasta&retmode=text&id=";

/// GET `endpoint + accession`, caching the raw FASTA body under
/// cache_dir/<accession>.fasta. A cache hit never touches the network.
FastaRecord fetch_sequence(const std::string& accession, const std::string& endpoint,
                           const std::filesystem::path& cache_dir);

}  // namespace palinscan
