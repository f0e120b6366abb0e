#include <catch2/catch_amalgamated.hpp>

#include <filesystem>
#include <sstream>

#include "robust_t/table_io.hpp"

using namespace robust_t;

namespace {

QuantileTable sample_table(StatisticKind kind) {
  TableMetadata meta;
  meta.replications = 123456;
  meta.seed = 42;
  meta.zero_scale_redraws = 7;
  QuantileTable::Rows rows{{4, {0.1, 0.30000000000000004, 2.5}}, {5, {0.1 / 3.0, 1.0 / 3.0, 1e-300 + 2.0}}};
  return QuantileTable(kind, {0.6, 0.9, 0.995}, rows, meta);
}

ErrorCode read_error(const std::string& text) {
  std::istringstream in(text);
  try {
    read_table(in);
  } catch (const Error& e) {
    return e.code();
  }
  FAIL("no error thrown");
  return ErrorCode::Io;
}

}  // namespace

TEST_CASE("real formatting round-trips exactly") {
  for (double v : {0.1, 1.0 / 3.0, 2.5758293035489004, 1e-300, 123456789.0, 0.30000000000000004}) {
    CHECK(parse_real(format_real(v)) == v);
  }
  CHECK(format_real(0.975) == "0.975");
  CHECK_THROWS_AS(parse_real("1.0x"), Error);
  CHECK(parse_real(" 2.5\r") == 2.5);
}

TEST_CASE("write then read reproduces the table bit for bit") {
  for (const auto& kind : {StatisticKind::ta(), StatisticKind::tb(PairIndexConvention::Inclusive)}) {
    const auto t = sample_table(kind);
    std::ostringstream out;
    write_table(out, t);
    std::istringstream in(out.str());
    const auto back = read_table(in);
    CHECK(back.statistic() == t.statistic());
    CHECK(back.statistic().convention == t.statistic().convention);
    CHECK(back.grid() == t.grid());
    CHECK(back.rows() == t.rows());
    CHECK(back.metadata().replications == 123456);
    CHECK(back.metadata().seed == 42);
    CHECK(back.metadata().zero_scale_redraws == 7);
    std::ostringstream again;
    write_table(again, back);
    CHECK(again.str() == out.str());
  }
}

TEST_CASE("file layout is a JSON line followed by CSV") {
  std::ostringstream out;
  write_table(out, sample_table(StatisticKind::ta()));
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  CHECK(line.rfind("{\"format\":\"robust-t-quantile-table\",\"generator_version\":\"1\"", 0) == 0);
  std::getline(in, line);
  CHECK(line == "n,0.6,0.9,0.995");
  std::getline(in, line);
  CHECK(line == "4,0.1,0.30000000000000004,2.5");
}

TEST_CASE("reader rejects malformed or foreign files") {
  std::ostringstream out;
  write_table(out, sample_table(StatisticKind::ta()));
  const std::string good = out.str();

  std::string wrong_version = good;
  wrong_version.replace(wrong_version.find("\"generator_version\":\"1\""), 23, "\"generator_version\":\"0\"");
  CHECK(read_error(wrong_version) == ErrorCode::VersionMismatch);
  CHECK(read_error("") == ErrorCode::TableFormat);
  CHECK(read_error("not json\n") == ErrorCode::TableFormat);
  CHECK(read_error(good.substr(0, good.find('\n') + 1)) == ErrorCode::TableFormat);

  std::string bad_row = good + "6,0.1,0.2\n";
  CHECK(read_error(bad_row) == ErrorCode::TableFormat);
  std::string dup = good + "5,0.1,0.2,0.3\n";
  CHECK(read_error(dup) == ErrorCode::TableFormat);
}

TEST_CASE("save and load through the filesystem") {
  const auto dir = std::filesystem::temp_directory_path() / "robust_t_table_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "t.table").string();
  const auto t = sample_table(StatisticKind::tb());
  save_table(path, t);
  const auto back = load_table(path);
  CHECK(back.rows() == t.rows());
  try {
    load_table((dir / "missing.table").string());
    FAIL("expected TableMissing");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::TableMissing);
  }
  std::filesystem::remove_all(dir);
}

TEST_CASE("typeset reference rows parse into a publication-grid table") {
  std::istringstream in(
      "% header line\n"
      "n && 0.60 & ... \\\\\n"
      "4&& 0.1 &0.2 &0.3 &0.4 &0.5 &0.6 &0.7 &0.8 &0.9 &1.0 &1.1 &1.2 \\\\\n"
      "  5 & 0.1 & 0.2 & 0.3 & 0.4 & 0.5 & 0.6 & 0.7 & 0.8 & 0.9 & 1.0 & 1.1 & 1.3\n");
  const auto t = parse_published_table(in, StatisticKind::ta());
  CHECK(t.min_n() == 4);
  CHECK(t.max_n() == 5);
  CHECK(t.rows().at(5).back() == 1.3);
  CHECK(t.metadata().generator_version == "reference");
}
