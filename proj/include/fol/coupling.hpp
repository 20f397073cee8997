#pragma once

#include <vector>

#include "fol/foliated.hpp"

namespace fol {

struct CouplingParams {
  double delta_minus = 0.1;
  double delta_plus = 0.45;
  /// regions are the cells of a blocks x blocks grid, N = blocks^2
  int blocks = 8;
  /// regularity class the tents must keep residuals in (residual <= 2 K0)
  double K0 = 1.0;
  /// pushforward steps between rounds
  int n0 = 2;
  /// tent height as a fraction of the local density; <= 0 picks
  /// 0.9 K0 / (r^-beta + 2 K0) with r = delta_minus / 10
  double kappa = 0.0;
  /// <= 0 computes the stable-return constant plus 2 delta_plus
  double L0 = 0.0;
};

struct CoupledPair {
  int round = 0;
  Vec2 source;
  Vec2 target;
  double mass = 0.0;
  /// stable distance at coupling time, including the holonomy mismatch
  double stable_length = 0.0;
  /// the same distance pulled back to time 0
  double pulled_back_length = 0.0;
};

struct PartialCoupling {
  FoliatedMeasure residual1;
  FoliatedMeasure residual2;
  /// coupled mass, as a fraction of the (normalized) inputs
  double mass = 0.0;
  /// mass the tents could have carried
  double capacity = 0.0;
  std::vector<CoupledPair> pairs;
  /// the coupled parts as quadrature nodes, masses summing to `mass`
  WeightedPoints slice1;
  WeightedPoints slice2;
  int block = -1;
  /// max distance between a translated source node and its target leaf
  double mismatch = 0.0;
};

double default_kappa(const CouplingParams& params, double beta);

/// Couples `mass` (all the tents allow when <= 0) of mu1 and mu2 across a
/// local stable segment through the centre of the region where both carry
/// the most mass. Leaves are matched by the monotone coupling of their tent
/// masses along that segment.
PartialCoupling partial_couple(const ToralMap& map, const FoliatedMeasure& mu1, const FoliatedMeasure& mu2,
                               const CouplingParams& params, double mass = 0.0);

struct AnosovConstants {
  double lambda0 = 0.0;
  double beta = 0.0;
  double tau = 0.0;
  int n0 = 1;
  double L0 = 0.0;
  double beta0 = 0.0;
  /// tau L0^beta / (1 - (1 - tau) lambda0^(-beta n0))
  double series_bound = 0.0;
  double ratio = 0.0;
};

/// Throws DivergentSeries when beta >= beta0.
AnosovConstants anosov_constants(double lambda0, double beta, double tau, int n0, double L0);

/// Largest over pairs of block centres of the shortest stable path that ends
/// delta_minus/100-close (along e_u) to the other centre; linear part only.
double stable_return_length(const ToralMap& map, double delta_minus, int blocks);

/// stable_return_length + 2 delta_plus, doubled for perturbed maps.
double coupling_L0(const ToralMap& map, const CouplingParams& params);

struct CouplingRound {
  int round = 0;
  double coupled_mass = 0.0;
  double cost = 0.0;
  double cost_bound = 0.0;
  double residual_mass = 0.0;
  double residual_K1 = 0.0;
  double residual_K2 = 0.0;
  int pairs = 0;
  double max_stable_length = 0.0;
  double mismatch = 0.0;
};

struct CouplingReport {
  int rounds = 0;
  AnosovConstants constants;
  double kappa = 0.0;
  std::vector<CouplingRound> history;
  std::vector<CoupledPair> pairs;
  double residual_mass = 0.0;
  bool residuals_identical = false;
  /// closed-form remainder for the uncoupled residual, 0 when identical
  double tail = 0.0;
  double bound = 0.0;
  double reconstruction_w1_1 = 0.0;
  double reconstruction_w1_2 = 0.0;
};

/// Rounds j = 0..k of partial coupling, each followed (except the last) by
/// n0 pushforward steps of the residuals. tau is half the round-0 capacity and
/// stays fixed, so the residual mass after round k is (1 - tau)^(k+1).
CouplingReport stable_coupling(const ToralMap& map, const FoliatedMeasure& mu1, const FoliatedMeasure& mu2,
                               double beta, int k, const CouplingParams& params = {}, int reconstruction_grid = 40);

}  // namespace fol
