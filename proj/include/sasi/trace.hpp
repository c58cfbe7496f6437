#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "sasi/protocol.hpp"
#include "sasi/word96.hpp"

namespace sasi {

// Line-oriented capture format (all hex lowercase, zero-padded to 24 digits):
//   SASI-TRACE v1 variant=<modular|hamming> width=96
//   S <index-decimal> <ids> <a> <b> <c> <d>
//   F <ids>
// The F line carries the pseudonym announced after the last recorded session.

struct TraceHeader {
    int format_version = 1;
    RotationVariant variant = RotationVariant::Modular;
    int width = 96;
    std::string seed_note;  // optional; appended as " note=<text>" when non-empty
};

struct SessionRecord {
    uint64_t index = 0;
    Word96 ids, a, b, c, d;

    friend bool operator==(const SessionRecord& x, const SessionRecord& y) {
        return x.index == y.index && x.ids == y.ids && x.a == y.a && x.b == y.b &&
               x.c == y.c && x.d == y.d;
    }
};

struct TraceError : std::runtime_error {
    size_t line;
    TraceError(size_t line_no, const std::string& what)
        : std::runtime_error("line " + std::to_string(line_no) + ": " + what),
          line(line_no) {}
};

// Streaming writer: header up front, records one by one, final pseudonym last.
class TraceWriter {
  public:
    TraceWriter(std::ostream& out, const TraceHeader& header);
    void add(const SessionRecord& rec);  // indices must arrive consecutive from 0
    void finish(Word96 final_ids);

  private:
    std::ostream& out_;
    uint64_t next_index_ = 0;
    bool finished_ = false;
};

void write_trace(std::ostream& out, const TraceHeader& header,
                 const std::vector<SessionRecord>& records, Word96 final_ids);

// Streaming reader; memory use is independent of trace length. Malformed
// input throws TraceError carrying the offending line number.
class TraceReader {
  public:
    explicit TraceReader(std::istream& in);

    const TraceHeader& header() const { return header_; }

    // Records in file order; nullopt once the final line has been consumed.
    std::optional<SessionRecord> next();

    // Valid only after next() returned nullopt.
    Word96 final_ids() const;
    bool finished() const { return finished_; }

  private:
    std::istream& in_;
    TraceHeader header_;
    Word96 final_ids_{};
    uint64_t expect_index_ = 0;
    size_t line_no_ = 0;
    bool finished_ = false;
};

struct TraceContents {
    TraceHeader header;
    std::vector<SessionRecord> records;
    Word96 final_ids;
};

TraceContents read_trace_all(std::istream& in);

// Pairs each record with the next record's pseudonym (or the final one),
// yielding attack-ready transcripts: exactly one per record.
class TranscriptLinker {
  public:
    explicit TranscriptLinker(TraceReader& reader);
    std::optional<Transcript> next();

  private:
    TraceReader& reader_;
    std::optional<SessionRecord> pending_;
};

}  // namespace sasi
