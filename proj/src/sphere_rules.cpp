#include "pekar/sphere_rules.hpp"

#include "pekar/grid.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace pekar {

namespace {

class RuleBuilder {
 public:
  explicit RuleBuilder(int degree) { rule_.degree = degree; }

  // (+-1, 0, 0) and permutations: 6 points
  void vertices(double w) {
    for (int axis = 0; axis < 3; ++axis)
      for (double s : {1.0, -1.0}) {
        Eigen::Vector3d p = Eigen::Vector3d::Zero();
        p[axis] = s;
        add(p, w);
      }
  }

  // (0, +-a, +-a) with a = 1/sqrt(2) and permutations: 12 points
  void edge_midpoints(double w) {
    const double a = std::sqrt(0.5);
    for (int zero = 0; zero < 3; ++zero)
      for (double s1 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0}) {
          Eigen::Vector3d p;
          p[zero] = 0.0;
          p[(zero + 1) % 3] = s1 * a;
          p[(zero + 2) % 3] = s2 * a;
          add(p, w);
        }
  }

  // (+-a, +-a, +-a) with a = 1/sqrt(3): 8 points
  void corners(double w) {
    const double a = std::sqrt(1.0 / 3.0);
    for (double s1 : {1.0, -1.0})
      for (double s2 : {1.0, -1.0})
        for (double s3 : {1.0, -1.0}) add({s1 * a, s2 * a, s3 * a}, w);
  }

  // (+-a, +-a, +-b), b = sqrt(1 - 2a^2), and permutations: 24 points
  void twin(double w, double a) {
    const double b = std::sqrt(1.0 - 2.0 * a * a);
    for (int odd = 0; odd < 3; ++odd)
      for (double s1 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0})
          for (double s3 : {1.0, -1.0}) {
            Eigen::Vector3d p;
            p[odd] = s3 * b;
            p[(odd + 1) % 3] = s1 * a;
            p[(odd + 2) % 3] = s2 * a;
            add(p, w);
          }
  }

  // (+-a, +-b, 0), b = sqrt(1 - a^2), and permutations: 24 points
  void planar(double w, double a) {
    const double b = std::sqrt(1.0 - a * a);
    const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 0, 1}, {1, 2, 0}, {2, 1, 0}}};
    for (const auto& pm : perms)
      for (double s1 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0}) {
          Eigen::Vector3d p;
          p[pm[0]] = s1 * a;
          p[pm[1]] = s2 * b;
          p[pm[2]] = 0.0;
          add(p, w);
        }
  }

  // (+-a, +-b, +-c), c = sqrt(1 - a^2 - b^2), all permutations: 48 points
  void generic(double w, double a, double b) {
    const double c = std::sqrt(1.0 - a * a - b * b);
    const std::array<double, 3> v{a, b, c};
    const std::array<std::array<int, 3>, 6> perms{{{0, 1, 2}, {1, 0, 2}, {0, 2, 1}, {2, 0, 1}, {1, 2, 0}, {2, 1, 0}}};
    for (const auto& pm : perms)
      for (double s1 : {1.0, -1.0})
        for (double s2 : {1.0, -1.0})
          for (double s3 : {1.0, -1.0}) add({s1 * v[pm[0]], s2 * v[pm[1]], s3 * v[pm[2]]}, w);
  }

  SphereRule take() { return std::move(rule_); }

 private:
  void add(const Eigen::Vector3d& p, double w) {
    rule_.points.push_back(p);
    rule_.weights.push_back(w);
  }
  SphereRule rule_;
};

}  // namespace

SphereRule lebedev_rule(int points) {
  switch (points) {
    case 6: {
      RuleBuilder b(3);
      b.vertices(1.0 / 6.0);
      return b.take();
    }
    case 14: {
      RuleBuilder b(5);
      b.vertices(1.0 / 15.0);
      b.corners(3.0 / 40.0);
      return b.take();
    }
    case 26: {
      RuleBuilder b(7);
      b.vertices(1.0 / 21.0);
      b.edge_midpoints(4.0 / 105.0);
      b.corners(9.0 / 280.0);
      return b.take();
    }
    case 50: {
      RuleBuilder b(11);
      b.vertices(4.0 / 315.0);
      b.edge_midpoints(64.0 / 2835.0);
      b.corners(27.0 / 1280.0);
      b.twin(14641.0 / 725760.0, 1.0 / std::sqrt(11.0));
      return b.take();
    }
    case 302: {
      RuleBuilder b(29);
      b.vertices(.8545911725128148E-3);
      b.corners(.3599119285025571E-2);
      b.twin(.3449788424305883E-2, .3515640345570105);
      b.twin(.3604822601419882E-2, .6566329410219612);
      b.twin(.3576729661743367E-2, .4729054132581005);
      b.twin(.2352101413689164E-2, .0961830852261478);
      b.twin(.3108953122413675E-2, .2219645236294178);
      b.twin(.3650045807677255E-2, .7011766416089545);
      b.planar(.2982344963171804E-2, .2644152887060663);
      b.planar(.3600820932216460E-2, .5718955891878961);
      b.generic(.3571540554273387E-2, .2510034751770465, .8000727494073951);
      b.generic(.3392312205006170E-2, .1233548532583327, .4127724083168531);
      return b.take();
    }
    case 590: {
      RuleBuilder b(41);
      b.vertices(.3095121295306187E-3);
      b.corners(.1852379698597489E-2);
      b.twin(.1871790639277744E-2, .7040954938227469);
      b.twin(.1858812585438317E-2, .6807744066455244);
      b.twin(.1852028828296213E-2, .6372546939258752);
      b.twin(.1846715956151242E-2, .5044419707800358);
      b.twin(.1818471778162769E-2, .4215761784010967);
      b.twin(.1749564657281154E-2, .3317920736472123);
      b.twin(.1617210647254411E-2, .2384736701421887);
      b.twin(.1384737234851692E-2, .1459036449157763);
      b.twin(.9764331165051050E-3, .0609503411550720);
      b.planar(.1857161196774078E-2, .6116843442009876);
      b.planar(.1705153996395864E-2, .3964755348199858);
      b.planar(.1300321685886048E-2, .1724782009907724);
      b.generic(.1842866472905286E-2, .5610263808622060, .3518280927733519);
      b.generic(.1802658934377451E-2, .4742392842551980, .2634716655937950);
      b.generic(.1849830560443660E-2, .5984126497885380, .1816640840360209);
      b.generic(.1713904507106709E-2, .3791035407695563, .1720795225656878);
      b.generic(.1555213603396808E-2, .2778673190586244, .0821302158193251);
      b.generic(.1802239128008525E-2, .5033564271075117, .0899920584207488);
      return b.take();
    }
    default:
      throw PekarError("lebedev_rule: unsupported point count " + std::to_string(points));
  }
}

SphereRule lebedev_rule_for_degree(int degree) {
  for (int pts : {6, 14, 26, 50, 302, 590}) {
    SphereRule r = lebedev_rule(pts);
    if (r.degree >= degree) return r;
  }
  throw PekarError("lebedev_rule_for_degree: no rule of degree " + std::to_string(degree));
}

}  // namespace pekar
