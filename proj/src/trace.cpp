#include "sasi/trace.hpp"

#include <istream>
#include <ostream>
#include <sstream>

#include "sasi/attack.hpp"  // variant_name

namespace sasi {

namespace {

constexpr const char* kMagic = "SASI-TRACE";

std::string header_line(const TraceHeader& h) {
    std::string line = std::string(kMagic) + " v" + std::to_string(h.format_version) +
                       " variant=" + variant_name(h.variant) +
                       " width=" + std::to_string(h.width);
    if (!h.seed_note.empty()) line += " note=" + h.seed_note;
    return line;
}

}  // namespace

TraceWriter::TraceWriter(std::ostream& out, const TraceHeader& header) : out_(out) {
    if (header.width != 96) throw std::invalid_argument("trace width must be 96");
    if (header.seed_note.find('\n') != std::string::npos)
        throw std::invalid_argument("seed note must be a single line");
    out_ << header_line(header) << '\n';
}

void TraceWriter::add(const SessionRecord& rec) {
    if (finished_) throw std::logic_error("trace already finished");
    if (rec.index != next_index_)
        throw std::invalid_argument("record indices must be consecutive from 0");
    next_index_++;
    out_ << "S " << rec.index << ' ' << to_hex(rec.ids) << ' ' << to_hex(rec.a) << ' '
         << to_hex(rec.b) << ' ' << to_hex(rec.c) << ' ' << to_hex(rec.d) << '\n';
}

void TraceWriter::finish(Word96 final_ids) {
    if (finished_) throw std::logic_error("trace already finished");
    finished_ = true;
    out_ << "F " << to_hex(final_ids) << '\n';
}

void write_trace(std::ostream& out, const TraceHeader& header,
                 const std::vector<SessionRecord>& records, Word96 final_ids) {
    TraceWriter w(out, header);
    for (const SessionRecord& r : records) w.add(r);
    w.finish(final_ids);
}

namespace {

Word96 parse_hex_field(const std::string& tok, size_t line_no) {
    try {
        return from_hex(tok);
    } catch (const std::invalid_argument&) {
        throw TraceError(line_no, "bad hex field '" + tok + "' (want 24 hex digits)");
    }
}

}  // namespace

TraceReader::TraceReader(std::istream& in) : in_(in) {
    std::string line;
    line_no_ = 1;
    if (!std::getline(in_, line)) throw TraceError(1, "empty input, missing header");
    std::istringstream hs(line);
    std::string magic, version, field;
    hs >> magic >> version;
    if (magic != kMagic) throw TraceError(1, "bad magic, expected SASI-TRACE");
    if (version.size() < 2 || version[0] != 'v')
        throw TraceError(1, "bad version token '" + version + "'");
    try {
        header_.format_version = std::stoi(version.substr(1));
    } catch (const std::exception&) {
        throw TraceError(1, "bad version token '" + version + "'");
    }
    if (header_.format_version != 1)
        throw TraceError(1, "unsupported format version " + version.substr(1));
    bool saw_variant = false, saw_width = false;
    while (hs >> field) {
        auto eq = field.find('=');
        if (eq == std::string::npos) throw TraceError(1, "bad header field '" + field + "'");
        std::string key = field.substr(0, eq), val = field.substr(eq + 1);
        if (key == "variant") {
            if (val == "modular") header_.variant = RotationVariant::Modular;
            else if (val == "hamming") header_.variant = RotationVariant::Hamming;
            else throw TraceError(1, "unknown variant '" + val + "'");
            saw_variant = true;
        } else if (key == "width") {
            if (val != "96") throw TraceError(1, "unsupported width " + val);
            header_.width = 96;
            saw_width = true;
        } else if (key == "note") {
            // note consumes the rest of the line verbatim
            std::string rest;
            std::getline(hs, rest);
            header_.seed_note = val + rest;
        } else {
            throw TraceError(1, "unknown header field '" + key + "'");
        }
    }
    if (!saw_variant || !saw_width) throw TraceError(1, "header missing variant/width");
}

std::optional<SessionRecord> TraceReader::next() {
    if (finished_) return std::nullopt;
    std::string line;
    if (!std::getline(in_, line)) throw TraceError(line_no_ + 1, "missing final IDS line");
    line_no_++;
    std::istringstream ls(line);
    std::string tag;
    ls >> tag;
    if (tag == "F") {
        std::string ids_tok, extra;
        if (!(ls >> ids_tok)) throw TraceError(line_no_, "missing final IDS value");
        if (ls >> extra) throw TraceError(line_no_, "trailing content on final line");
        final_ids_ = parse_hex_field(ids_tok, line_no_);
        // nothing may follow the final line
        std::string rest;
        if (std::getline(in_, rest))
            throw TraceError(line_no_ + 1, "content after final line");
        finished_ = true;
        return std::nullopt;
    }
    if (tag != "S") throw TraceError(line_no_, "unknown record tag '" + tag + "'");
    SessionRecord rec;
    std::string idx_tok;
    if (!(ls >> idx_tok)) throw TraceError(line_no_, "missing record index");
    try {
        size_t pos = 0;
        rec.index = std::stoull(idx_tok, &pos);
        if (pos != idx_tok.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
        throw TraceError(line_no_, "bad record index '" + idx_tok + "'");
    }
    if (rec.index != expect_index_)
        throw TraceError(line_no_, "non-consecutive index " + std::to_string(rec.index) +
                                       ", expected " + std::to_string(expect_index_));
    expect_index_++;
    Word96* fields[5] = {&rec.ids, &rec.a, &rec.b, &rec.c, &rec.d};
    for (Word96* f : fields) {
        std::string tok;
        if (!(ls >> tok)) throw TraceError(line_no_, "record line has too few fields");
        *f = parse_hex_field(tok, line_no_);
    }
    std::string extra;
    if (ls >> extra) throw TraceError(line_no_, "record line has too many fields");
    return rec;
}

Word96 TraceReader::final_ids() const {
    if (!finished_) throw std::logic_error("final IDS not yet read");
    return final_ids_;
}

TraceContents read_trace_all(std::istream& in) {
    TraceReader r(in);
    TraceContents c;
    c.header = r.header();
    while (auto rec = r.next()) c.records.push_back(*rec);
    c.final_ids = r.final_ids();
    return c;
}

TranscriptLinker::TranscriptLinker(TraceReader& reader) : reader_(reader) {
    pending_ = reader_.next();
}

std::optional<Transcript> TranscriptLinker::next() {
    if (!pending_) return std::nullopt;
    SessionRecord cur = *pending_;
    pending_ = reader_.next();
    Word96 ids_next = pending_ ? pending_->ids : reader_.final_ids();
    return Transcript{cur.ids, cur.a, cur.b, cur.c, cur.d, ids_next};
}

}  // namespace sasi
