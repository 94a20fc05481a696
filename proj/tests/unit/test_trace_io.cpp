#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "kmsec/errors.hpp"
#include "kmsec/estimate.hpp"
#include "kmsec/trace_io.hpp"

using namespace kmsec;
using namespace kmsec::trace_io;

namespace {

std::filesystem::path temp_path(const std::string& name) {
    return std::filesystem::temp_directory_path() / ("kmsec_test_" + name);
}

}  // namespace

TEST_SUITE("trace_io") {
    TEST_CASE("csv round trip is exact") {
        const auto t = estimate::synthetic_envelope(2.0, 1.5, 1.0, 500, 3);
        for (bool header : {true, false}) {
            std::stringstream ss;
            write_csv(ss, t, header);
            CHECK(read_csv(ss).samples == t.samples);
        }
    }

    TEST_CASE("csv header, blank lines and extra columns") {
        std::istringstream in("envelope,time\n1.5,0\n\n  2.25 ,1\r\n0\n");
        const auto t = read_csv(in);
        CHECK(t.samples == std::vector<double>{1.5, 2.25, 0.0});
    }

    TEST_CASE("malformed csv") {
        std::istringstream bad_value("x\n1.0\nabc\n");
        CHECK_THROWS_AS(read_csv(bad_value), FormatError);
        std::istringstream negative("1.0\n-2.0\n");
        CHECK_THROWS_AS(read_csv(negative), FormatError);
        std::istringstream header_only("envelope\n");
        CHECK_THROWS_AS(read_csv(header_only), FormatError);
        std::istringstream inf("1.0\ninf\n");
        CHECK_THROWS_AS(read_csv(inf), FormatError);
    }

    TEST_CASE("binary round trip at float precision") {
        const auto t = estimate::synthetic_envelope(1.0, 0.8, 2.0, 300, 4);
        std::stringstream ss;
        write_binary(ss, t);
        const std::string bytes = ss.str();
        CHECK(bytes.size() == 8 + 4 * t.samples.size());
        CHECK(bytes.substr(0, 8) == "KMUTRC01");
        const auto back = read_binary(ss);
        REQUIRE(back.samples.size() == t.samples.size());
        for (std::size_t i = 0; i < t.samples.size(); ++i) {
            CHECK(back.samples[i] == static_cast<double>(static_cast<float>(t.samples[i])));
        }
    }

    TEST_CASE("binary layout is little endian") {
        // 1.0f = 0x3f800000
        std::istringstream in(std::string("KMUTRC01") + std::string("\x00\x00\x80\x3f", 4));
        CHECK(read_binary(in).samples == std::vector<double>{1.0});
    }

    TEST_CASE("malformed binary") {
        std::istringstream wrong_magic(std::string("KMUTRC02") + std::string(4, '\0'));
        CHECK_THROWS_AS(read_binary(wrong_magic), FormatError);
        std::istringstream truncated(std::string("KMUTRC01") + std::string(6, '\0'));
        CHECK_THROWS_AS(read_binary(truncated), FormatError);
        std::istringstream empty(std::string("KMUTRC01"));
        CHECK_THROWS_AS(read_binary(empty), FormatError);
        // -1.0f = 0xbf800000
        std::istringstream negative(std::string("KMUTRC01") + std::string("\x00\x00\x80\xbf", 4));
        CHECK_THROWS_AS(read_binary(negative), FormatError);
    }

    TEST_CASE("read_trace sniffs the format") {
        const auto t = estimate::synthetic_envelope(2.0, 1.0, 1.0, 100, 5);
        const auto csv = temp_path("sniff.csv");
        const auto bin = temp_path("sniff.bin");
        {
            std::ofstream f(csv);
            write_csv(f, t);
        }
        {
            std::ofstream f(bin, std::ios::binary);
            write_binary(f, t);
        }
        CHECK(read_trace(csv).samples == t.samples);
        CHECK(read_trace(bin).samples.size() == t.samples.size());
        CHECK_THROWS_AS(read_trace(temp_path("does_not_exist")), FormatError);
        std::filesystem::remove(csv);
        std::filesystem::remove(bin);
    }
}
