#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <limits>
#include <random>

#include "clevo/errors.hpp"
#include "clevo/table.hpp"

using namespace clevo;

TEST_SUITE("table") {
  TEST_CASE("shortest formatting round-trips") {
    std::mt19937_64 rng(99);
    for (int i = 0; i < 20000; ++i) {
      double v;
      const std::uint64_t bits = rng();
      std::memcpy(&v, &bits, sizeof v);
      if (!std::isfinite(v)) continue;
      const std::string s = format_double(v);
      CHECK(std::strtod(s.c_str(), nullptr) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(1.0) == "1");
    CHECK(format_double(-2.5e-300) == "-2.5e-300");
  }

  TEST_CASE("csv round trip") {
    Table t;
    t.columns = {"t", "value"};
    t.add_row({0.0, 1.0 / 3.0});
    t.add_row({1e-17, -4.25});
    const std::string csv = t.to_csv();
    CHECK(csv.rfind("t,value\n", 0) == 0);
    const Table back = Table::from_csv(csv);
    CHECK(back.columns == t.columns);
    CHECK(back.rows == t.rows);
    CHECK(back.to_csv() == csv);
  }

  TEST_CASE("row width is enforced") {
    Table t;
    t.columns = {"a", "b"};
    CHECK_THROWS_AS(t.add_row({1.0}), InvalidArgument);
    CHECK_THROWS_AS(Table::from_csv("a,b\n1\n"), InvalidArgument);
    CHECK_THROWS_AS(Table::from_csv("a,b\n1,x\n"), IoError);
  }

  TEST_CASE("file io") {
    const auto dir = std::filesystem::temp_directory_path() / "clevo_table_test";
    std::filesystem::create_directories(dir);
    const auto path = (dir / "t.csv").string();
    write_text_file(path, "a\n1\n");
    CHECK(read_text_file(path) == "a\n1\n");
    CHECK_THROWS_AS(read_text_file((dir / "missing.csv").string()), IoError);
    CHECK_THROWS_AS(write_text_file((dir / "no_such_dir" / "x.csv").string(), "x"), IoError);
    std::filesystem::remove_all(dir);
  }
}
