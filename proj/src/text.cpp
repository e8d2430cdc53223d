#include "mcgp/text.hpp"

#include <array>
#include <charconv>
#include <cstdio>
#include <iostream>
#include <mutex>
#include <string>

#include "mcgp/log.hpp"
#include "mcgp/predictive.hpp"

namespace mcgp {

std::string format_double(double v) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    if (ec != std::errc{}) return "nan";
    return {buf.data(), ptr};
}

std::optional<double> parse_double(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::optional<long long> parse_integer(std::string_view s) {
    if (s.empty()) return std::nullopt;
    if (s.front() == '+') s.remove_prefix(1);
    long long v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

std::string fnv1a_hex(std::string_view bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016llx", static_cast<unsigned long long>(h));
    return out;
}

namespace {

std::mutex& sink_mutex() {
    static std::mutex m;
    return m;
}

LogSink& sink() {
    static LogSink s = [](std::string_view msg) { std::cerr << "mcgp: warning: " << msg << '\n'; };
    return s;
}

}  // namespace

void set_log_sink(LogSink s) {
    std::lock_guard lock(sink_mutex());
    sink() = std::move(s);
}

void log_warning(std::string_view message) {
    std::lock_guard lock(sink_mutex());
    if (sink()) sink()(message);
}

void finalize_predictive(PredictiveDistribution& pd, Matrix covariance) {
    covariance = 0.5 * (covariance + covariance.transpose()).eval();
    pd.clamped = 0;
    for (Eigen::Index k = 0; k < covariance.rows(); ++k) {
        if (covariance(k, k) < 0.0) {
            covariance(k, k) = 0.0;
            ++pd.clamped;
        }
    }
    if (pd.clamped > 0) {
        log_warning("clamped " + std::to_string(pd.clamped) + " negative predictive variance(s) to 0 for cell '" +
                    pd.cell + "'");
    }
    pd.stddev = covariance.diagonal().array().sqrt();
    pd.covariance = SymMatrix::from_dense(std::move(covariance));
}

}  // namespace mcgp
