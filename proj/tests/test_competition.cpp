#include <doctest.h>

#include <cmath>
#include <random>

#include "modcomp/competition.hpp"
#include "modcomp/error.hpp"
#include "support.hpp"

using namespace modcomp;

TEST_CASE("enumerate_models: order and counts") {
  const auto all = enumerate_models(6);
  CHECK(all.size() == 63);
  CHECK(all.front().label() == "{1}");
  CHECK(all[6].label() == "{1,2}");
  CHECK(all.back().label() == "{1,2,3,4,5,6}");
  for (std::size_t i = 1; i < all.size(); ++i) CHECK(all[i - 1] < all[i]);
  CHECK(enumerate_models(6, 2).size() == 21);
  CHECK(enumerate_models(1).size() == 1);
  CHECK_THROWS_WITH_AS(enumerate_models(21), "roster too large", InputError);
  CHECK_THROWS_AS(enumerate_models(0), InputError);
}

TEST_CASE("roster validation") {
  CHECK_THROWS_AS(AgentRoster{}.validate(), InputError);
  auto r = AgentRoster::shared({Model({1}), Model({2})}, {});
  r.labels[1] = r.labels[0];
  CHECK_THROWS_AS(r.validate(), InputError);
}

TEST_CASE("with a single observation every winner is a singleton on the largest |x|") {
  std::mt19937_64 rng(31);
  const auto roster = AgentRoster::shared(enumerate_models(6), {2.0, 1.0, 0.001});
  for (int trial = 0; trial < 200; ++trial) {
    const auto d = testing::random_dataset(rng, 1, 6);
    const auto result = run_competition(d, roster);
    REQUIRE(result.winner_model.size() == 1);
    Eigen::Index best;
    d.X.row(0).cwiseAbs().maxCoeff(&best);
    CHECK(result.winner_model.indices()[0] == best + 1);
  }
}

TEST_CASE("winner has the minimum loss and the margin is the gap") {
  std::mt19937_64 rng(32);
  const auto roster = AgentRoster::shared(enumerate_models(4), {2.0, 1.0, 0.01});
  for (int trial = 0; trial < 50; ++trial) {
    const auto d = testing::random_dataset(rng, 3 + trial, 4);
    const auto r = run_competition(d, roster);
    std::vector<double> sorted = r.losses;
    std::sort(sorted.begin(), sorted.end());
    CHECK(r.losses[r.winner_index] == sorted[0]);
    CHECK(r.margin == doctest::Approx(sorted[1] - sorted[0]).epsilon(1e-12));
    CHECK(r.disqualified() == 0);
  }
}

TEST_CASE("ties go to the smallest model, then roster order") {
  Dataset empty;
  empty.X.resize(0, 3);
  empty.y.resize(0);
  // Before data all agents share the same loss.
  auto models = enumerate_models(3);
  std::reverse(models.begin(), models.end());
  const auto r = run_competition(empty, AgentRoster::shared(models, {2.0, 1.0, 0.001}));
  CHECK(r.tie);
  CHECK(r.tie_across_sizes);
  CHECK(r.winner_model.label() == "{1}");

  auto twins = AgentRoster::shared({Model({2}), Model({2})}, {2.0, 1.0, 0.001});
  twins.labels = {"first", "second"};
  const auto t = run_competition(empty, twins);
  CHECK(t.tie);
  CHECK_FALSE(t.tie_across_sizes);
  CHECK(t.winner_index == 0);
}

TEST_CASE("agents that cannot be evaluated are disqualified") {
  std::mt19937_64 rng(33);
  const auto d = testing::random_dataset(rng, 2, 4);
  auto roster = AgentRoster::shared({Model({1}), Model::full(4)}, {2.0, 1.0, 0.0});
  const auto r = run_competition(d, roster);
  CHECK(r.disqualified() == 1);
  CHECK(std::isnan(r.losses[1]));
  REQUIRE(r.errors[1].has_value());
  CHECK(r.errors[1]->find("singular design") != std::string::npos);
  CHECK(r.winner_index == 0);

  auto doomed = AgentRoster::shared({Model::full(4)}, {2.0, 1.0, 0.0});
  CHECK_THROWS_AS(run_competition(d, doomed), NumericError);
}

TEST_CASE("known-variance competition: winner size stays below k for n <= k") {
  std::mt19937_64 rng(34);
  const auto roster = AgentRoster::known_variance(enumerate_models(6), 0.001, 1.0);
  for (int trial = 0; trial < 100; ++trial) {
    const auto r = run_competition(testing::random_dataset(rng, 1 + trial % 6, 6), roster);
    CHECK(r.winner_model.size() < 6);
  }
}

TEST_CASE("moments overload agrees with the dataset overload") {
  std::mt19937_64 rng(35);
  const auto d = testing::random_dataset(rng, 9, 5);
  const auto roster = AgentRoster::shared(enumerate_models(5), {2.0, 1.0, 0.001});
  const auto a = run_competition(d, roster);
  const auto b = run_competition(DesignMoments::of(d), roster);
  CHECK(a.winner_index == b.winner_index);
  CHECK(a.losses == b.losses);
}

TEST_CASE("second-price auction") {
  std::mt19937_64 rng(36);
  const auto roster = AgentRoster::shared(enumerate_models(4), {2.0, 1.0, 0.01});
  for (int trial = 0; trial < 30; ++trial) {
    const auto d = testing::random_dataset(rng, 2 + trial, 4);
    const auto comp = run_competition(d, roster);
    const auto auc = run_auction(d, roster, 100.0);
    CHECK(auc.winner_index == comp.winner_index);
    std::vector<double> bids = auc.bids;
    std::sort(bids.rbegin(), bids.rend());
    CHECK(auc.price == bids[1]);
    CHECK(auc.price <= auc.bids[auc.winner_index]);
    CHECK(auc.bids[0] == doctest::Approx(100.0 - comp.losses[0]).epsilon(1e-14));
  }
  const auto solo = run_auction(testing::random_dataset(rng, 5, 2), AgentRoster::shared({Model({1})}, {}), 10.0);
  CHECK(solo.degenerate);
  CHECK(solo.price == solo.bids[0]);
}
