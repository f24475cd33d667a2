#pragma once

// Dataset file:
//
//   # twinbeam sweep dataset v1
//   # plan.start_mhz = -56
//   # ...                         (plan, channel model; shortest exact form)
//   detuning_mhz,s_sum,s_diff,s_ch1,s_ch2,n_samples
//   -56,1.00731,0.992046,1.03082,0.969529,600
//
// Data rows carry six significant digits. Writing is byte-stable for a fixed
// dataset, and write(read(file)) reproduces file.

#include <charconv>
#include <cstdint>
#include <istream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <fmt/format.h>
#include <fmt/ostream.h>

#include "twinbeam/errors.hpp"
#include "twinbeam/sweep_lab.hpp"

namespace twinbeam {

inline constexpr std::string_view kDatasetMagic = "# twinbeam sweep dataset v1";
inline constexpr std::string_view kDatasetColumns = "detuning_mhz,s_sum,s_diff,s_ch1,s_ch2,n_samples";

namespace detail {

inline std::string_view trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) {
        return {};
    }
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

template <typename T>
std::optional<T> parse_number(std::string_view s) {
    s = trim(s);
    if (s.empty()) {
        return std::nullopt;
    }
    if (s.front() == '+') {
        s.remove_prefix(1);
    }
    T value{};
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
    if (ec != std::errc{} || ptr != s.data() + s.size()) {
        return std::nullopt;
    }
    return value;
}

inline void write_cavity(std::ostream& os, std::string_view prefix, const CavitySpec& c) {
    fmt::print(os, "# {}.r1 = {}\n", prefix, c.r1());
    fmt::print(os, "# {}.loss = {}\n", prefix, c.loss());
    fmt::print(os, "# {}.bandwidth_mhz = {}\n", prefix, c.bandwidth_mhz());
}

}  // namespace detail

inline void write_dataset(std::ostream& os, const SweepDataset& ds) {
    fmt::print(os, "{}\n", kDatasetMagic);
    fmt::print(os, "# plan.start_mhz = {}\n", ds.plan.start_mhz);
    fmt::print(os, "# plan.end_mhz = {}\n", ds.plan.end_mhz);
    fmt::print(os, "# plan.points = {}\n", ds.plan.points);
    fmt::print(os, "# plan.rbw_khz = {}\n", ds.plan.rbw_khz);
    fmt::print(os, "# plan.vbw_khz = {}\n", ds.plan.vbw_khz);
    fmt::print(os, "# plan.seed = {}\n", ds.plan.seed);
    detail::write_cavity(os, "model.cavity1", ds.model.cavity1);
    detail::write_cavity(os, "model.cavity2", ds.model.cavity2);
    fmt::print(os, "# model.analysis_mhz = {}\n", ds.model.analysis_mhz);
    fmt::print(os, "# model.efficiency = {}\n", ds.model.efficiency);
    for (double s : ds.skipped_mhz) {
        fmt::print(os, "# skipped_mhz = {}\n", s);
    }
    fmt::print(os, "{}\n", kDatasetColumns);
    for (const auto& r : ds.rows) {
        fmt::print(os, "{:.6g},{:.6g},{:.6g},{:.6g},{:.6g},{}\n", r.detuning_mhz, r.s_sum, r.s_diff,
                   r.s_ch1, r.s_ch2, r.n_samples);
    }
}

[[nodiscard]] inline std::string dataset_to_string(const SweepDataset& ds) {
    std::ostringstream os;
    write_dataset(os, ds);
    return os.str();
}

// Throws DataFormatError naming the 1-based line of the first problem.
[[nodiscard]] inline SweepDataset read_dataset(std::istream& is) {
    std::string line;
    std::size_t lineno = 0;
    if (!std::getline(is, line) || detail::trim(line) != kDatasetMagic) {
        throw DataFormatError("missing dataset header line", 1);
    }
    ++lineno;

    std::map<std::string, std::pair<std::string, std::size_t>, std::less<>> header;
    std::vector<std::pair<double, std::size_t>> skipped;
    bool columns_seen = false;
    SweepDataset ds;
    std::vector<std::pair<SweepRow, std::size_t>> rows;

    while (std::getline(is, line)) {
        ++lineno;
        const std::string_view view = detail::trim(line);
        if (view.empty()) {
            continue;
        }
        if (view.front() == '#') {
            if (columns_seen) {
                continue;
            }
            const std::string_view body = detail::trim(view.substr(1));
            const auto eq = body.find('=');
            if (eq == std::string_view::npos) {
                continue;
            }
            std::string key(detail::trim(body.substr(0, eq)));
            std::string value(detail::trim(body.substr(eq + 1)));
            if (key == "skipped_mhz") {
                const auto v = detail::parse_number<double>(value);
                if (!v) {
                    throw DataFormatError(fmt::format("bad skipped_mhz value '{}'", value), lineno);
                }
                skipped.emplace_back(*v, lineno);
            } else {
                header[key] = {value, lineno};
            }
            continue;
        }
        if (!columns_seen) {
            if (view != kDatasetColumns) {
                throw DataFormatError(
                    fmt::format("expected column header '{}'", kDatasetColumns), lineno);
            }
            columns_seen = true;
            continue;
        }

        std::vector<std::string_view> fields;
        std::string_view rest = view;
        while (true) {
            const auto comma = rest.find(',');
            fields.push_back(rest.substr(0, comma));
            if (comma == std::string_view::npos) {
                break;
            }
            rest.remove_prefix(comma + 1);
        }
        if (fields.size() != 6) {
            throw DataFormatError(fmt::format("row has {} fields, expected 6", fields.size()),
                                  lineno);
        }
        SweepRow r;
        double* targets[] = {&r.detuning_mhz, &r.s_sum, &r.s_diff, &r.s_ch1, &r.s_ch2};
        for (std::size_t k = 0; k < 5; ++k) {
            const auto v = detail::parse_number<double>(fields[k]);
            if (!v || !std::isfinite(*v)) {
                throw DataFormatError(
                    fmt::format("field {} is not a finite number: '{}'", k + 1, fields[k]), lineno);
            }
            *targets[k] = *v;
        }
        if (!(r.s_sum > 0.0 && r.s_diff > 0.0 && r.s_ch1 > 0.0 && r.s_ch2 > 0.0)) {
            throw DataFormatError("variances must be positive", lineno);
        }
        const auto n = detail::parse_number<std::size_t>(fields[5]);
        if (!n || *n < 2) {
            throw DataFormatError(fmt::format("bad n_samples '{}'", fields[5]), lineno);
        }
        r.n_samples = *n;
        rows.emplace_back(r, lineno);
    }
    if (!columns_seen) {
        throw DataFormatError("missing column header", lineno + 1);
    }

    const auto get = [&](std::string_view key) -> std::pair<double, std::size_t> {
        const auto it = header.find(key);
        if (it == header.end()) {
            throw DataFormatError(fmt::format("header is missing '{}'", key), 1);
        }
        const auto v = detail::parse_number<double>(it->second.first);
        if (!v) {
            throw DataFormatError(fmt::format("header '{}' is not a number", key), it->second.second);
        }
        return {*v, it->second.second};
    };
    const auto get_u64 = [&](std::string_view key) -> std::uint64_t {
        const auto it = header.find(key);
        if (it == header.end()) {
            throw DataFormatError(fmt::format("header is missing '{}'", key), 1);
        }
        const auto v = detail::parse_number<std::uint64_t>(it->second.first);
        if (!v) {
            throw DataFormatError(fmt::format("header '{}' is not an integer", key),
                                  it->second.second);
        }
        return *v;
    };

    ds.plan.start_mhz = get("plan.start_mhz").first;
    ds.plan.end_mhz = get("plan.end_mhz").first;
    ds.plan.points = static_cast<std::size_t>(get_u64("plan.points"));
    ds.plan.rbw_khz = get("plan.rbw_khz").first;
    ds.plan.vbw_khz = get("plan.vbw_khz").first;
    ds.plan.seed = get_u64("plan.seed");
    try {
        ds.plan.validate();
        const auto cavity = [&](std::string_view prefix) {
            return CavitySpec::make(get(fmt::format("{}.r1", prefix)).first,
                                    get(fmt::format("{}.loss", prefix)).first,
                                    get(fmt::format("{}.bandwidth_mhz", prefix)).first);
        };
        ds.model = ChannelModel::make(cavity("model.cavity1"), cavity("model.cavity2"),
                                      get("model.analysis_mhz").first,
                                      get("model.efficiency").first);
    } catch (const DataFormatError&) {
        throw;
    } catch (const InvalidInput& e) {
        throw DataFormatError(fmt::format("invalid header: {}", e.what()), 1);
    }
    for (const auto& [v, ln] : skipped) {
        ds.skipped_mhz.push_back(v);
    }
    for (const auto& [r, ln] : rows) {
        ds.rows.push_back(r);
    }
    return ds;
}

[[nodiscard]] inline SweepDataset dataset_from_string(const std::string& text) {
    std::istringstream is(text);
    return read_dataset(is);
}

}  // namespace twinbeam
