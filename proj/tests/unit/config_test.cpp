#include <gmock/gmock.h>
#include <gtest/gtest.h>

#include <string>

#include "rootrecon/config.hpp"
#include "rootrecon/errors.hpp"

namespace rootrecon {
namespace {

using ::testing::Contains;
using ::testing::HasSubstr;

auto data_path(const std::string& name) -> std::string { return std::string{ROOTRECON_TEST_DATA_DIR} + "/" + name; }

auto config_error_message(std::string_view text) -> std::string {
  try {
    parse_config(text);
  } catch (const Config_error& e) {
    return e.what();
  }
  return {};
}

TEST(Config, ParsesEveryGroup) {
  auto c = parse_config(R"(
# comment line
family.kind = pinched_star
family.k = 12
family.pinch = 0.1   # trailing comment
family.height = 2
experiment.k = 3, 7,12
process.kind = uniform
process.states = 5
process.rate = 0.25
estimator.kind = uniform
estimator.epsilon = 0.02
estimator.s = 0.2
estimator.h_star = 2.5
estimator.row_samples = 500
root = 3
trials = 40
seed = 99
threads = 2
output = out/run
)");
  EXPECT_EQ(c.family_kind, Family_kind::pinched_star);
  EXPECT_EQ(c.family.k, 12);
  EXPECT_DOUBLE_EQ(c.family.pinch, 0.1);
  EXPECT_DOUBLE_EQ(c.family.height, 2.0);
  EXPECT_EQ(c.effective_k_values(), (std::vector<std::size_t>{3, 7, 12}));
  EXPECT_EQ(c.process, Process_kind::uniform);
  EXPECT_EQ(c.states, 5u);
  EXPECT_DOUBLE_EQ(c.rate, 0.25);
  EXPECT_EQ(c.estimator, Estimator_kind::uniform);
  EXPECT_DOUBLE_EQ(c.epsilon, 0.02);
  EXPECT_DOUBLE_EQ(c.s, 0.2);
  EXPECT_DOUBLE_EQ(c.h_star, 2.5);
  EXPECT_EQ(c.row_samples, 500u);
  EXPECT_EQ(c.fixed_root, 3);
  EXPECT_EQ(c.trials, 40u);
  EXPECT_EQ(c.seed, 99u);
  EXPECT_EQ(c.threads, 2u);
  EXPECT_EQ(c.output, "out/run");
  EXPECT_TRUE(validate(c).empty());
}

TEST(Config, DefaultKValuesFollowFamilyK) {
  auto c = parse_config("family.k = 8\n");
  EXPECT_EQ(c.effective_k_values(), std::vector<std::size_t>{8});
}

TEST(Config, Tkf91Keys) {
  auto c = parse_config("process.kind = tkf91\ntkf91.lambda = 0.4\ntkf91.mu = 0.8\ntkf91.nu = 2\n"
                        "tkf91.pi = 0.1, 0.2, 0.3, 0.4\n");
  EXPECT_EQ(c.process, Process_kind::tkf91);
  EXPECT_DOUBLE_EQ(c.tkf91.lambda, 0.4);
  EXPECT_DOUBLE_EQ(c.tkf91.mu, 0.8);
  EXPECT_DOUBLE_EQ(c.tkf91.nu, 2.0);
  EXPECT_DOUBLE_EQ(c.tkf91.pi[3], 0.4);
}

TEST(Config, ErrorsNameTheKey) {
  EXPECT_THAT(config_error_message("estimator.smoothing = 2\n"), HasSubstr("estimator.smoothing"));
  EXPECT_THAT(config_error_message("trials = 4\ntrials = 5\n"), HasSubstr("trials"));
  EXPECT_THAT(config_error_message("process.q = fast\n"), HasSubstr("process.q"));
  EXPECT_THAT(config_error_message("family.kind = spiral\n"), HasSubstr("family.kind"));
  EXPECT_THAT(config_error_message("tkf91.pi = 0.5, 0.5\n"), HasSubstr("tkf91.pi"));
  EXPECT_THAT(config_error_message("family.kind = file\n"), HasSubstr("family.file"));
  EXPECT_THAT(config_error_message("just words\n"), HasSubstr("line 1"));
}

TEST(Config, ValidateReportsLambdaNotBelowMu) {
  auto c = load_config(data_path("lambda_equals_mu.cfg"));
  EXPECT_THAT(validate(c), Contains("tkf91: lambda must be < mu"));
}

TEST(Config, ValidateReportsNestingIndex) {
  auto c = load_config(data_path("non_nested.cfg"));
  EXPECT_THAT(validate(c), Contains("family: not nested at k = 2"));
  EXPECT_TRUE(validate(load_config(data_path("zero_rates.cfg"))).empty());
}

TEST(Config, ValidateCollectsEveryViolation) {
  auto c = parse_config("family.kind = star\nfamily.k = 4\nfamily.height = 2\nestimator.h_star = 1\n"
                        "process.kind = uniform\nprocess.states = 3\nestimator.kind = majority\nroot = 7\n");
  c.s = 0.0;
  auto v = validate(c);
  EXPECT_THAT(v, Contains("estimator.s: s must be > 0"));
  EXPECT_THAT(v, Contains("estimator.h_star: below the family height"));
  EXPECT_THAT(v, Contains("estimator.kind: majority needs a two-state chain"));
  EXPECT_THAT(v, Contains("root: state 7 is out of range"));
}

TEST(Config, Tkf91OnlyWithFrequencyAndRandomRoot) {
  auto c = parse_config("process.kind = tkf91\nestimator.kind = map\nroot = 0\n");
  auto v = validate(c);
  EXPECT_THAT(v, Contains("estimator.kind: only the frequency estimator supports tkf91"));
  EXPECT_THAT(v, Contains("root: tkf91 roots are drawn from the stationary law"));
}

TEST(Config, HashIgnoresThreadsAndOutput) {
  auto a = parse_config("family.k = 6\nseed = 3\nthreads = 1\noutput = a\n");
  auto b = parse_config("seed = 3\nfamily.k = 6\nthreads = 8\noutput = b\n");
  auto c = parse_config("family.k = 6\nseed = 4\n");
  EXPECT_EQ(config_hash(a), config_hash(b));
  EXPECT_NE(config_hash(a), config_hash(c));
  EXPECT_EQ(config_hash(a).size(), 16u);
  EXPECT_EQ(canonical_text(a), canonical_text(b));
  EXPECT_EQ(canonical_text(a).find("threads"), std::string::npos);
}

TEST(Config, KindNamesRoundTrip) {
  for (auto k : {Process_kind::two_state, Process_kind::uniform, Process_kind::matrix, Process_kind::tkf91}) {
    EXPECT_EQ(parse_process_kind(to_string(k)), k);
  }
  for (auto k : {Estimator_kind::map, Estimator_kind::frequency, Estimator_kind::uniform, Estimator_kind::majority}) {
    EXPECT_EQ(parse_estimator_kind(to_string(k)), k);
  }
}

}  // namespace
}  // namespace rootrecon
