#include "lisac/scenario.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include <json.hpp>

#include "lisac/rng.hpp"

namespace lisac {

namespace {

nlohmann::json position_json(const Position& p) { return nlohmann::json{p.x, p.y, p.z}; }

Position position_from_json(const nlohmann::json& j) {
  if (!j.is_array() || j.size() != 3)
    throw std::invalid_argument("scenario: position must be a [x, y, z] array");
  return Position{j[0].get<double>(), j[1].get<double>(), j[2].get<double>()};
}

}  // namespace

void Scenario::validate() const {
  if (!(x_min < x_max && y_min < y_max))
    throw std::invalid_argument("scenario: empty mission area");
  if (users.empty()) throw std::invalid_argument("scenario: at least one user required");
  if (t_slots < 1) throw std::invalid_argument("scenario: T must be >= 1");
  if (!(t_d > 0.0)) throw std::invalid_argument("scenario: slot length must be positive");
  if (m_antennas < 1 || l_elements < 1)
    throw std::invalid_argument("scenario: M and L must be >= 1");
  if (!(p_max > 0.0)) throw std::invalid_argument("scenario: p_max must be positive");
  if (!(sigma2 > 0.0)) throw std::invalid_argument("scenario: sigma2 must be positive");
  if (!(v_min >= 0.0 && v_min <= v_max))
    throw std::invalid_argument("scenario: need 0 <= v_min <= v_max");
  if (uav_start.z != z_r)
    throw std::invalid_argument("scenario: uav_start.z must equal z_r");

  auto inside = [&](const Position& p) {
    return p.x >= x_min && p.x <= x_max && p.y >= y_min && p.y <= y_max;
  };
  for (const Position& u : users) {
    if (!inside(u) || u.z != 0.0)
      throw std::invalid_argument("scenario: users must be inside the area at z = 0");
  }
  if (!inside(target) || target.z != 0.0)
    throw std::invalid_argument("scenario: target must be inside the area at z = 0");

  channel.validate();
  sensing.validate();
  energy.validate();
  if (energy.t_d != t_d)
    throw std::invalid_argument("scenario: energy.t_d must equal the slot length");
}

nlohmann::json Scenario::to_json() const {
  nlohmann::json j;
  j["x_min"] = x_min;
  j["x_max"] = x_max;
  j["y_min"] = y_min;
  j["y_max"] = y_max;
  j["bs"] = position_json(bs);
  j["users"] = nlohmann::json::array();
  for (const Position& u : users) j["users"].push_back(position_json(u));
  j["target"] = position_json(target);
  j["uav_start"] = position_json(uav_start);
  j["z_r"] = z_r;
  j["t_slots"] = t_slots;
  j["t_d"] = t_d;
  j["m_antennas"] = m_antennas;
  j["l_elements"] = l_elements;
  j["p_max"] = p_max;
  j["sigma2"] = sigma2;
  j["v_min"] = v_min;
  j["v_max"] = v_max;
  j["channel"] = {{"l0", channel.l0},
                  {"alpha_bu", channel.alpha_bu},
                  {"alpha_br", channel.alpha_br},
                  {"alpha_ru", channel.alpha_ru},
                  {"rician_eta", channel.rician_eta},
                  {"d_r_over_lambda", channel.d_r_over_lambda},
                  {"d_s_over_lambda", channel.d_s_over_lambda}};
  j["sensing"] = {{"alpha_r_model", sensing.alpha_r_model}};
  j["energy"] = {{"p_a", energy.p_a}, {"p_b", energy.p_b},   {"v_tip", energy.v_tip},
                 {"v_a", energy.v_a}, {"d_a", energy.d_a},   {"rho", energy.rho},
                 {"s", energy.s},     {"a", energy.a},       {"t_d", energy.t_d}};
  j["xi1"] = xi1;
  j["p_o"] = p_o;
  return j;
}

Scenario Scenario::from_json(const nlohmann::json& j) {
  Scenario sc;
  auto get = [&](const char* key, auto& field) {
    if (j.contains(key)) field = j.at(key).get<std::decay_t<decltype(field)>>();
  };
  get("x_min", sc.x_min);
  get("x_max", sc.x_max);
  get("y_min", sc.y_min);
  get("y_max", sc.y_max);
  if (j.contains("bs")) sc.bs = position_from_json(j.at("bs"));
  if (j.contains("users")) {
    sc.users.clear();
    for (const auto& u : j.at("users")) sc.users.push_back(position_from_json(u));
  }
  if (j.contains("target")) sc.target = position_from_json(j.at("target"));
  if (j.contains("uav_start")) sc.uav_start = position_from_json(j.at("uav_start"));
  get("z_r", sc.z_r);
  get("t_slots", sc.t_slots);
  get("t_d", sc.t_d);
  get("m_antennas", sc.m_antennas);
  get("l_elements", sc.l_elements);
  get("p_max", sc.p_max);
  get("sigma2", sc.sigma2);
  get("v_min", sc.v_min);
  get("v_max", sc.v_max);
  if (j.contains("channel")) {
    const auto& c = j.at("channel");
    auto getc = [&](const char* key, double& field) {
      if (c.contains(key)) field = c.at(key).get<double>();
    };
    getc("l0", sc.channel.l0);
    getc("alpha_bu", sc.channel.alpha_bu);
    getc("alpha_br", sc.channel.alpha_br);
    getc("alpha_ru", sc.channel.alpha_ru);
    getc("rician_eta", sc.channel.rician_eta);
    getc("d_r_over_lambda", sc.channel.d_r_over_lambda);
    getc("d_s_over_lambda", sc.channel.d_s_over_lambda);
  }
  if (j.contains("sensing") && j.at("sensing").contains("alpha_r_model"))
    sc.sensing.alpha_r_model = j.at("sensing").at("alpha_r_model").get<double>();
  if (j.contains("energy")) {
    const auto& e = j.at("energy");
    auto gete = [&](const char* key, double& field) {
      if (e.contains(key)) field = e.at(key).get<double>();
    };
    gete("p_a", sc.energy.p_a);
    gete("p_b", sc.energy.p_b);
    gete("v_tip", sc.energy.v_tip);
    gete("v_a", sc.energy.v_a);
    gete("d_a", sc.energy.d_a);
    gete("rho", sc.energy.rho);
    gete("s", sc.energy.s);
    gete("a", sc.energy.a);
    gete("t_d", sc.energy.t_d);
  }
  get("xi1", sc.xi1);
  get("p_o", sc.p_o);
  sc.validate();
  return sc;
}

Scenario Scenario::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("scenario: cannot open " + path);
  nlohmann::json j;
  in >> j;
  return from_json(j);
}

void place_default_cluster(Scenario& sc, int n_users) {
  Rng layout(20240915ULL);
  auto draw = [&]() {
    const double r = 60.0 * std::sqrt(layout.uniform());
    const double phi = 2.0 * std::numbers::pi * layout.uniform();
    return Position{150.0 + r * std::cos(phi), 150.0 + r * std::sin(phi), 0.0};
  };
  sc.users.clear();
  for (int n = 0; n < n_users; ++n) sc.users.push_back(draw());
  sc.target = draw();
}

Scenario Scenario::desk() {
  Scenario sc;
  sc.t_slots = 40;
  sc.m_antennas = 2;
  sc.l_elements = 8;
  place_default_cluster(sc, 2);
  sc.validate();
  return sc;
}

Scenario Scenario::paper() {
  Scenario sc;
  sc.t_slots = 100;
  sc.m_antennas = 4;
  sc.l_elements = 16;
  place_default_cluster(sc, 3);
  sc.validate();
  return sc;
}

}  // namespace lisac
