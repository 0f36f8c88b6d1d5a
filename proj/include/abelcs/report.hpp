#pragma once

// Check records and report serialization.  JSON output is canonical: fields
// in a fixed order, shortest-roundtrip number formatting, and (unless timing
// capture is enabled) zeroed runtimes, so identical configurations produce
// byte-identical reports regardless of worker count.

#include <complex>
#include <cstdint>
#include <iomanip>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

namespace abelcs {

enum class CheckStatus { Pass, Fail, Inconclusive };

inline const char* to_string(CheckStatus s) {
    switch (s) {
        case CheckStatus::Pass: return "pass";
        case CheckStatus::Fail: return "fail";
        default: return "inconclusive";
    }
}

struct CheckRecord {
    std::string id;
    std::string anchor;  // which mathematical statement the check exercises
    CheckStatus status = CheckStatus::Pass;
    std::complex<double> measured{};
    std::complex<double> expected{};
    double tolerance = 0;
    double error_estimate = 0;
    std::int64_t samples = 0;
    std::uint64_t seed = 0;
    double runtime_ms = 0;
};

struct Report {
    std::vector<CheckRecord> records;
    bool capture_timings = false;  // volatile timings break byte-identity

    int exit_code() const {
        for (const auto& r : records)
            if (r.status == CheckStatus::Fail) return 1;
        return 0;
    }

    std::string to_json() const {
        nlohmann::ordered_json arr = nlohmann::ordered_json::array();
        for (const auto& r : records) {
            nlohmann::ordered_json j;
            j["id"] = r.id;
            j["anchor"] = r.anchor;
            j["status"] = to_string(r.status);
            j["measured"] = {r.measured.real(), r.measured.imag()};
            j["expected"] = {r.expected.real(), r.expected.imag()};
            j["tolerance"] = r.tolerance;
            j["error_estimate"] = r.error_estimate;
            j["samples"] = r.samples;
            j["seed"] = r.seed;
            j["runtime_ms"] = capture_timings ? r.runtime_ms : 0.0;
            arr.push_back(std::move(j));
        }
        return arr.dump(2) + "\n";
    }

    std::string to_text() const {
        std::ostringstream out;
        auto num = [](std::complex<double> v) {
            std::ostringstream s;
            s << std::setprecision(6) << std::scientific;
            if (v.imag() == 0.0)
                s << v.real();
            else
                s << v.real() << (v.imag() < 0 ? "-" : "+") << std::abs(v.imag()) << "i";
            return s.str();
        };
        out << std::left << std::setw(34) << "check" << std::setw(14) << "status" << std::setw(28)
            << "measured" << std::setw(14) << "expected" << std::setw(11) << "tol" << std::setw(11)
            << "err" << std::setw(10) << "samples" << std::setw(9) << "ms"
            << "anchor\n";
        out << std::string(140, '-') << "\n";
        for (const auto& r : records) {
            std::ostringstream tol, err, ms;
            tol << std::setprecision(1) << std::scientific << r.tolerance;
            err << std::setprecision(1) << std::scientific << r.error_estimate;
            ms << std::fixed << std::setprecision(0) << (capture_timings ? r.runtime_ms : 0.0);
            out << std::left << std::setw(34) << r.id << std::setw(14) << to_string(r.status)
                << std::setw(28) << num(r.measured) << std::setw(14) << num(r.expected)
                << std::setw(11) << tol.str() << std::setw(11) << err.str() << std::setw(10)
                << r.samples << std::setw(9) << ms.str() << r.anchor << "\n";
        }
        int pass = 0, fail = 0, inc = 0;
        for (const auto& r : records)
            (r.status == CheckStatus::Pass ? pass : (r.status == CheckStatus::Fail ? fail : inc))++;
        out << std::string(140, '-') << "\n";
        out << pass << " pass, " << fail << " fail, " << inc << " inconclusive\n";
        return out.str();
    }
};

}  // namespace abelcs
