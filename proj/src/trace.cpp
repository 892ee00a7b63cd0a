#include "relaxsoh/trace.hpp"
#include "relaxsoh/errors.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <string_view>

namespace relaxsoh {

namespace {

// Splits a CSV line into fields; no quoting (numeric data only).
std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        std::size_t pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            break;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
    return out;
}

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view field, long line_no) {
    field = trim(field);
    if (field.empty())
        throw ParseError("empty numeric field", line_no);
    double value = 0.0;
    auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
    if (ec != std::errc() || ptr != field.data() + field.size())
        throw ParseError("invalid number '" + std::string(field) + "'", line_no);
    if (!std::isfinite(value))
        throw ParseError("non-finite number '" + std::string(field) + "'", line_no);
    return value;
}

void append_num(std::string& out, double value) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6g", value);
    out += buf;
}

} // namespace

bool VoltageTrace::has_current() const {
    return !samples.empty() &&
           std::all_of(samples.begin(), samples.end(),
                       [](const VoltageSample& s) { return s.i_ma.has_value(); });
}

std::vector<double> VoltageTrace::voltages() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.v);
    return out;
}

std::vector<double> VoltageTrace::times() const {
    std::vector<double> out;
    out.reserve(samples.size());
    for (const auto& s : samples) out.push_back(s.t_s);
    return out;
}

VoltageTrace parse_trace(const std::string& csv_text) {
    VoltageTrace trace;
    std::string_view rest(csv_text);
    long line_no = 0;
    bool has_i = false, has_temp = false;
    bool saw_header = false;

    while (!rest.empty()) {
        std::size_t nl = rest.find('\n');
        std::string_view line = rest.substr(0, nl);
        rest = (nl == std::string_view::npos) ? std::string_view() : rest.substr(nl + 1);
        ++line_no;
        line = trim(line);
        if (line.empty()) continue;

        auto fields = split_fields(line);
        for (auto& f : fields) f = trim(f);

        if (!saw_header) {
            if (fields.size() < 2 || fields[0] != "t_s" || fields[1] != "v_V")
                throw ParseError("expected header starting with 't_s,v_V'", line_no);
            std::size_t idx = 2;
            if (idx < fields.size() && fields[idx] == "i_mA") { has_i = true; ++idx; }
            if (idx < fields.size() && fields[idx] == "temp_C") { has_temp = true; ++idx; }
            if (idx != fields.size())
                throw ParseError("unrecognized header column '" + std::string(fields[idx]) + "'",
                                 line_no);
            saw_header = true;
            continue;
        }

        std::size_t expected = 2 + (has_i ? 1 : 0) + (has_temp ? 1 : 0);
        if (fields.size() != expected)
            throw ParseError("expected " + std::to_string(expected) + " fields, got " +
                                 std::to_string(fields.size()),
                             line_no);
        VoltageSample s;
        s.t_s = parse_double(fields[0], line_no);
        s.v = parse_double(fields[1], line_no);
        std::size_t idx = 2;
        if (has_i) s.i_ma = parse_double(fields[idx++], line_no);
        if (has_temp) s.temp_c = parse_double(fields[idx++], line_no);
        trace.samples.push_back(s);
    }

    if (!saw_header)
        throw ParseError("empty input: missing header", 1);
    if (trace.samples.size() < 2)
        throw ValidationError("trace needs at least 2 samples, got " +
                              std::to_string(trace.samples.size()));

    std::vector<double> gaps;
    gaps.reserve(trace.samples.size() - 1);
    for (std::size_t i = 1; i < trace.samples.size(); ++i)
        gaps.push_back(trace.samples[i].t_s - trace.samples[i - 1].t_s);
    std::sort(gaps.begin(), gaps.end());
    std::size_t mid = gaps.size() / 2;
    trace.sample_interval_s =
        (gaps.size() % 2 == 1) ? gaps[mid] : 0.5 * (gaps[mid - 1] + gaps[mid]);

    validate_trace(trace);
    return trace;
}

std::string serialize_trace(const VoltageTrace& trace) {
    bool has_i = trace.has_current();
    bool has_temp = !trace.samples.empty() &&
                    std::all_of(trace.samples.begin(), trace.samples.end(),
                                [](const VoltageSample& s) { return s.temp_c.has_value(); });
    std::string out = "t_s,v_V";
    if (has_i) out += ",i_mA";
    if (has_temp) out += ",temp_C";
    out += '\n';
    for (const auto& s : trace.samples) {
        append_num(out, s.t_s);
        out += ',';
        append_num(out, s.v);
        if (has_i) {
            out += ',';
            append_num(out, *s.i_ma);
        }
        if (has_temp) {
            out += ',';
            append_num(out, *s.temp_c);
        }
        out += '\n';
    }
    return out;
}

std::vector<double> dropped_voltage(const VoltageTrace& trace) {
    if (trace.samples.empty()) return {};
    std::vector<double> out;
    out.reserve(trace.samples.size());
    double v0 = trace.samples.front().v;
    for (const auto& s : trace.samples) out.push_back(v0 - s.v);
    return out;
}

std::vector<double> resample_to_grid(const VoltageTrace& trace, const GridSpec& grid) {
    validate_trace(trace);
    if (grid.interval_s <= 0.0 || grid.duration_s <= 0.0)
        throw ValidationError("grid duration and interval must be positive");
    if (trace.duration_s() < grid.duration_s - grid.interval_s)
        throw ValidationError("trace spans " + std::to_string(trace.duration_s()) +
                              " s but grid needs " + std::to_string(grid.duration_s) + " s");

    const auto& ss = trace.samples;
    double t0 = ss.front().t_s;
    std::vector<double> out;
    out.reserve(grid.size());
    std::size_t j = 0;
    for (std::size_t k = 0; k < grid.size(); ++k) {
        double t = t0 + static_cast<double>(k) * grid.interval_s;
        while (j + 2 < ss.size() && ss[j + 1].t_s <= t) ++j;
        double ta = ss[j].t_s, tb = ss[j + 1].t_s;
        double f = (t - ta) / (tb - ta);
        // The tail may extrapolate by at most one interval; clamp to the last segment.
        out.push_back(ss[j].v + f * (ss[j + 1].v - ss[j].v));
    }
    return out;
}

void validate_trace(const VoltageTrace& trace) {
    if (trace.samples.size() < 2)
        throw ValidationError("trace needs at least 2 samples, got " +
                              std::to_string(trace.samples.size()));
    if (trace.sample_interval_s <= 0.0)
        throw ValidationError("sample interval must be positive");
    for (std::size_t i = 0; i < trace.samples.size(); ++i) {
        const auto& s = trace.samples[i];
        if (!(s.v > 2.0 && s.v < 5.0))
            throw ValidationError("voltage " + std::to_string(s.v) +
                                  " V out of range (2.0, 5.0) at sample " + std::to_string(i));
        if (i > 0) {
            double gap = s.t_s - trace.samples[i - 1].t_s;
            if (gap <= 0.0)
                throw ValidationError("timestamps not strictly increasing at sample " +
                                      std::to_string(i));
            if (gap > 2.0 * trace.sample_interval_s + 1e-9)
                throw ValidationError("gap of " + std::to_string(gap) + " s at sample " +
                                      std::to_string(i) + " exceeds twice the nominal interval");
        }
    }
}

} // namespace relaxsoh
