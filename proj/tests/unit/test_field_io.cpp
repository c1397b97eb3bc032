#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>

#include "bvdeg/errors.hpp"
#include "bvdeg/field_io.hpp"
#include "bvdeg/gallery.hpp"

using namespace bvdeg;
namespace fs = std::filesystem;

namespace {

class FieldIo : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() / ("bvdeg_io_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
                                        "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }
  fs::path dir_;
};

SampledMap identity_map() {
  GallerySpec s;
  s.name = "identity3d";
  const std::size_t shape[3] = {4, 5, 3};
  return sample_gallery(s, shape);
}

void patch_f64(const fs::path& file, std::size_t index, double v) {
  std::fstream io(file, std::ios::in | std::ios::out | std::ios::binary);
  io.seekp(static_cast<std::streamoff>(8 * index));
  char bytes[8];
  std::memcpy(bytes, &v, 8);
  io.write(bytes, 8);
}

}  // namespace

TEST_F(FieldIo, MapRoundTripIsBitExact) {
  const auto f = identity_map();
  save_field(dir_ / "id", f);
  const auto g = load_map(dir_ / "id.json");
  EXPECT_EQ(g.dim_in(), 3);
  EXPECT_EQ(g.dim_out(), 3);
  EXPECT_EQ(g.grid().shape, f.grid().shape);
  ASSERT_EQ(g.values().size(), f.values().size());
  EXPECT_EQ(std::memcmp(g.values().data(), f.values().data(), 8 * f.values().size()), 0);
  // The extension may be omitted.
  EXPECT_NO_THROW(load_map(dir_ / "id"));
}

TEST_F(FieldIo, MeasureRoundTrip) {
  const std::size_t shape[2] = {3, 2};
  const double h[2] = {0.5, 0.25}, o[2] = {0.25, 0.125};
  const CellMeasure mu(Grid::make(shape, h, o), 2, {1, 2, 3, 4, 5, 6, 7, 8, 9, 10, 11, -12.5});
  save_field(dir_ / "mu", mu);
  const auto back = load_measure(dir_ / "mu.json");
  EXPECT_EQ(back.components(), 2);
  EXPECT_EQ(std::vector<double>(back.weights().begin(), back.weights().end()),
            std::vector<double>(mu.weights().begin(), mu.weights().end()));
  EXPECT_THROW(load_map(dir_ / "mu.json"), ParseError);
}

TEST_F(FieldIo, ShapeMismatchIsRejected) {
  save_field(dir_ / "id", identity_map());
  std::ofstream(dir_ / "id.f64", std::ios::binary | std::ios::app).write("\0\0\0\0\0\0\0\0", 8);
  EXPECT_THROW(load_map(dir_ / "id.json"), ParseError);
}

TEST_F(FieldIo, NanNamesFirstIndex) {
  save_field(dir_ / "id", identity_map());
  patch_f64(dir_ / "id.f64", 17, std::nan(""));
  patch_f64(dir_ / "id.f64", 40, std::nan(""));
  try {
    load_map(dir_ / "id.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("index 17"), std::string::npos) << e.what();
    EXPECT_EQ(e.offset(), 8u * 17u);
  }
}

TEST_F(FieldIo, MalformedDescriptorReportsOffset) {
  std::ofstream(dir_ / "bad.json") << "{\"kind\": \"map\", \"shape\": [2, 2,}";
  try {
    load_field(dir_ / "bad.json");
    FAIL() << "expected ParseError";
  } catch (const ParseError& e) {
    EXPECT_GT(e.offset(), 20u);
  }
  std::ofstream(dir_ / "kind.json") << "{\"kind\": \"cube\"}";
  EXPECT_THROW(load_field(dir_ / "kind.json"), ParseError);
  EXPECT_THROW(load_field(dir_ / "missing.json"), ParseError);
}
