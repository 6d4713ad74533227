#pragma once

#include <exception>
#include <functional>
#include <map>
#include <string>
#include <thread>
#include <vector>

namespace ddm {

inline constexpr const char* kArtifactVersion = "1.0.0";

// %.17g: shortest text that round-trips a double exactly
std::string format_double(double v);

std::string json_escape(const std::string& s);

// key = value configuration text; '#' comments; optional [section] headers
// turn following keys into "section.key".
std::map<std::string, std::string> parse_config_text(const std::string& text);
std::map<std::string, std::string> parse_config_file(const std::string& path);
std::string config_to_text(const std::map<std::string, std::string>& cfg);
std::string config_echo_json(const std::map<std::string, std::string>& cfg);

// "1e4,1e6,1e8" -> doubles; throws std::invalid_argument on junk
std::vector<double> parse_double_list(const std::string& text);

// One run = one JSON object; the non-deterministic fields (timings) live in
// "meta" which occupies exactly line 2, so payloads compare byte-for-byte.
std::string run_record(const std::string& meta_json, const std::string& payload_json);

std::string csv_row(const std::vector<std::string>& cells);

// Static work distribution preserving input order of results; work(i) must
// write only to slot i of its output. threads <= 1 runs inline.
template <typename F>
void parallel_for_ordered(int count, int threads, F&& work) {
    if (count <= 0) return;
    const int nt = std::min(std::max(threads, 1), count);
    if (nt == 1) {
        for (int i = 0; i < count; ++i) work(i);
        return;
    }
    std::vector<std::thread> pool;
    pool.reserve(nt);
    for (int t = 0; t < nt; ++t)
        pool.emplace_back([&, t] {
            for (int i = t; i < count; i += nt) work(i);
        });
    for (auto& th : pool) th.join();
}

// parallel_for_ordered with worker exceptions captured per slot and the
// lowest-index one rethrown, so failures are independent of worker count.
template <typename F>
void parallel_for_checked(int count, int threads, F&& work) {
    if (count <= 0) return;
    std::vector<std::exception_ptr> errs(count);
    parallel_for_ordered(count, threads, [&](int i) {
        try {
            work(i);
        } catch (...) {
            errs[i] = std::current_exception();
        }
    });
    for (int i = 0; i < count; ++i)
        if (errs[i]) std::rethrow_exception(errs[i]);
}

}  // namespace ddm
