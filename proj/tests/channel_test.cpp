#include "doctest.h"

#include "acp/channel.hpp"
#include "acp/errors.hpp"
#include "support/frozen.hpp"

using namespace acp;
namespace ft = acp::testing;

TEST_SUITE("channel") {

TEST_CASE("path loss reference points") {
  CHECK(path_loss_db(20.0, 6.0) == doctest::Approx(ft::kPathLoss20m).epsilon(1e-12));
  CHECK(path_loss_db(100.0, 6.0) == doctest::Approx(ft::kPathLoss100m).epsilon(1e-12));
  // +20 dB per decade of distance
  CHECK(path_loss_db(100.0, 6.0) - path_loss_db(10.0, 6.0) == doctest::Approx(20.0).epsilon(1e-12));
  CHECK_THROWS_AS(path_loss_db(0.0, 6.0), DomainError);
  CHECK_THROWS_AS(path_loss_db(20.0, -1.0), DomainError);
}

TEST_CASE("link budget at 20 m") {
  const RadioParams radio;
  const LinkState link = make_link(20.0, radio);
  CHECK(link.gain == doctest::Approx(ft::kGain20m).epsilon(1e-12));
  CHECK(snr_linear(link, radio) == doctest::Approx(ft::kSnr20m).epsilon(1e-12));
  CHECK(spectral_efficiency(link, radio) == doctest::Approx(ft::kSpectralEff20m).epsilon(1e-12));
  CHECK(link_rate(1.0, 10.5e6, link, radio) == doctest::Approx(ft::kFullRate20m).epsilon(1e-12));
}

TEST_CASE("rate scales with the bandwidth fraction") {
  const RadioParams radio;
  const LinkState link = make_link(20.0, radio);
  const double full = link_rate(1.0, 10.5e6, link, radio);
  CHECK(link_rate(0.5, 10.5e6, link, radio) == doctest::Approx(full / 2).epsilon(1e-12));
  CHECK(link_rate(0.0, 10.5e6, link, radio) == 0.0);
  CHECK_THROWS_AS(link_rate(-0.1, 10.5e6, link, radio), DomainError);
  CHECK_THROWS_AS(link_rate(1.1, 10.5e6, link, radio), DomainError);
}

TEST_CASE("rate decays with distance") {
  const RadioParams radio;
  double prev = 1e18;
  for (double d : {5.0, 10.0, 20.0, 40.0, 60.0}) {
    const double r = link_rate(1.0, 10.5e6, make_link(d, radio), radio);
    CHECK(r < prev);
    CHECK(r > 0);
    prev = r;
  }
}

}  // TEST_SUITE
