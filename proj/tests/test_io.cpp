#include <cmath>
#include <string>

#include <gtest/gtest.h>

#include "chibounds/io.hpp"

using namespace chibounds;
using namespace chibounds::io;
using Eigen::MatrixXd;

namespace {

ErrorKind kind_of(auto&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorKind::ParseError;
}

}  // namespace

TEST(MatrixFile, RoundTrip) {
  MatrixXd m(2, 2);
  m << 1.0, 0.6, 0.6, 1.0;
  const auto doc = matrix_to_json(m, {{0}, {1}});
  const auto back = parse_matrix_file(parse_json(doc.dump()));
  EXPECT_EQ(back.data, m);
  EXPECT_EQ(back.partition, (poscone::Bipartition{{0}, {1}}));
}

TEST(MatrixFile, Errors) {
  EXPECT_EQ(kind_of([] { parse_json("{not json"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse_matrix_file(parse_json(R"({"dim": 2})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] {
              parse_matrix_file(parse_json(R"({"dim": 2, "data": [1, 0, 0], "partition": {"a": [0], "b": [1]}})"));
            }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] {
              parse_matrix_file(parse_json(R"({"dim": 1, "data": ["x"], "partition": {"a": [0], "b": []}})"));
            }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] {
              parse_matrix_file(parse_json(R"({"dim": 2, "data": [1,0,0,1], "partition": {"a": [-1], "b": [1]}})"));
            }),
            ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { read_file("/nonexistent/file.json"); }), ErrorKind::ParseError);
}

TEST(PartitionFlag, Parses) {
  EXPECT_EQ(parse_partition_flag("a=0,1;b=2,3"), (poscone::Bipartition{{0, 1}, {2, 3}}));
  EXPECT_EQ(parse_partition_flag("a=3;b=0,2"), (poscone::Bipartition{{3}, {0, 2}}));
  for (const char* bad : {"", "a=0", "a=0;c=1", "a=0,;b=1", "a=x;b=1", "a=-1;b=0", "a=1.5;b=0"}) {
    EXPECT_EQ(kind_of([&] { parse_partition_flag(bad); }), ErrorKind::ParseError) << bad;
  }
}

TEST(GaussianFile, RoundTrip) {
  const auto gs = gaussian::squeezing_network(0.4, MatrixXd::Ones(1, 2));
  const auto back = parse_gaussian(parse_json(gaussian_to_json(gs).dump()));
  EXPECT_EQ(back.cov(), gs.cov());
  EXPECT_EQ(back.partition().a, gs.partition().a);
  EXPECT_EQ(back.partition().b, gs.partition().b);
  EXPECT_EQ(kind_of([] { parse_gaussian(parse_json(R"({"n_modes": 1, "cov": [1,0,0,1], "a_modes": [0]})")); }),
            ErrorKind::ParseError);
}

TEST(SpinFile, RoundTrip) {
  const auto s = spin::ghz_family(4, 0.1);
  const auto back = parse_spin(parse_json(spin_to_json(s).dump()));
  EXPECT_EQ(back.amps(), s.amps());
  EXPECT_EQ(back.two_j(), 4);
  EXPECT_EQ(kind_of([] { parse_spin(parse_json(R"({"two_j": 1, "amps": [[1]]})")); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { parse_spin(parse_json(R"({"two_j": 102, "amps": []})")); }), ErrorKind::BadSpin);
  EXPECT_EQ(kind_of([] { parse_spin(parse_json(R"({"two_j": 1, "amps": [[1,0],[1,0]]})")); }),
            ErrorKind::OutOfRange);
}

TEST(Json, ShortestRoundTripDoubles) {
  for (double x : {0.1, 1.0 / 3.0, 0.8236215523858653, 1e-300, -2.5e17}) {
    const json doc = {{"x", x}};
    EXPECT_EQ(parse_json(doc.dump()).at("x").get<double>(), x);
  }
}

TEST(Csv, RoundTripIsExact) {
  const auto s = saturation::synthesize_series(1.5, 0.1, 1.0, 0.2, 3, saturation::Grid{-1, 1, 33}.points());
  const auto text = series_to_csv(s);
  EXPECT_EQ(text.rfind("lambda,measure,bound,deficit\n", 0), 0u);
  const auto back = series_from_csv(text);
  ASSERT_EQ(back.records.size(), s.records.size());
  for (std::size_t i = 0; i < s.records.size(); ++i) {
    EXPECT_EQ(back.records[i].lambda, s.records[i].lambda);
    EXPECT_EQ(back.records[i].deficit, s.records[i].deficit);
  }
  EXPECT_EQ(series_to_csv(back), text);
}

TEST(Csv, Errors) {
  EXPECT_EQ(kind_of([] { series_from_csv("x,y\n1,2\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { series_from_csv("lambda,measure,bound,deficit\n1,2,3\n"); }), ErrorKind::ParseError);
  EXPECT_EQ(kind_of([] { series_from_csv("lambda,measure,bound,deficit\n1,2,3,q\n"); }), ErrorKind::ParseError);
}

TEST(Format, SeventeenDigits) {
  EXPECT_EQ(format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(format_double(2.0), "2");
}

TEST(Digest, StableFnv1a) {
  EXPECT_EQ(digest(""), "cbf29ce484222325");
  EXPECT_EQ(digest("a"), "af63dc4c8601ec8c");
  EXPECT_NE(digest("ab"), digest("ba"));
}

TEST(Reports, FieldNames) {
  const auto floor = to_json(gaussian::entanglement_floor(gaussian::two_mode_squeezed(0.5)));
  for (const char* k : {"e_n", "chi_mode", "floor", "margin", "per_mode_taus"}) EXPECT_TRUE(floor.contains(k)) << k;
  const auto su11 = to_json(su11::su11_ceiling(su11::squeezed_vacuum(0.0, 16, su11::Realization::OneMode),
                                               su11::NormConvention::Euclidean));
  EXPECT_EQ(su11.at("norm_convention"), "euclidean");
}
