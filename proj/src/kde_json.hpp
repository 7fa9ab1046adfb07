// Internal JSON converters shared by the model writers.
#pragma once

#include <json.hpp>

#include "slb/kde.hpp"

namespace slb::detail {

inline nlohmann::json kde1d_to_json(const Kde1d& k) {
  nlohmann::json j;
  j["points"] = k.points;
  j["bandwidth"] = k.bandwidth;
  j["clamp_floor"] = k.clamp_floor;
  j["clamp_ceiling"] = k.clamp_ceiling ? nlohmann::json(*k.clamp_ceiling) : nlohmann::json(nullptr);
  return j;
}

inline Kde1d kde1d_from_json(const nlohmann::json& j) {
  Kde1d k;
  k.points = j.at("points").get<std::vector<double>>();
  k.bandwidth = j.at("bandwidth").get<double>();
  k.clamp_floor = j.at("clamp_floor").get<double>();
  if (!j.at("clamp_ceiling").is_null()) k.clamp_ceiling = j.at("clamp_ceiling").get<double>();
  return k;
}

inline nlohmann::json kde2d_to_json(const Kde2d& k) {
  nlohmann::json j;
  j["u"] = k.u;
  j["v"] = k.v;
  j["hu"] = k.hu;
  j["hv"] = k.hv;
  j["clamp_floor"] = k.clamp_floor;
  j["clamp_ceiling"] = k.clamp_ceiling ? nlohmann::json(*k.clamp_ceiling) : nlohmann::json(nullptr);
  return j;
}

inline Kde2d kde2d_from_json(const nlohmann::json& j) {
  Kde2d k;
  k.u = j.at("u").get<std::vector<double>>();
  k.v = j.at("v").get<std::vector<double>>();
  k.hu = j.at("hu").get<double>();
  k.hv = j.at("hv").get<double>();
  k.clamp_floor = j.at("clamp_floor").get<double>();
  if (!j.at("clamp_ceiling").is_null()) k.clamp_ceiling = j.at("clamp_ceiling").get<double>();
  return k;
}

inline nlohmann::json grid1d_to_json(const GridKde1d& g) {
  return nlohmann::json{
      {"lo", g.lo}, {"hi", g.hi}, {"step", g.step}, {"log_table", g.log_table}};
}

inline GridKde1d grid1d_from_json(const nlohmann::json& j) {
  GridKde1d g;
  g.lo = j.at("lo").get<double>();
  g.hi = j.at("hi").get<double>();
  g.step = j.at("step").get<double>();
  g.log_table = j.at("log_table").get<std::vector<double>>();
  return g;
}

inline nlohmann::json grid2d_to_json(const GridKde2d& g) {
  nlohmann::json j;
  j["lo_u"] = g.lo_u;
  j["hi_u"] = g.hi_u;
  j["step_u"] = g.step_u;
  j["lo_v"] = g.lo_v;
  j["hi_v"] = g.hi_v;
  j["step_v"] = g.step_v;
  j["nodes"] = g.nodes;
  j["log_table"] = g.log_table;
  return j;
}

inline GridKde2d grid2d_from_json(const nlohmann::json& j) {
  GridKde2d g;
  g.lo_u = j.at("lo_u").get<double>();
  g.hi_u = j.at("hi_u").get<double>();
  g.step_u = j.at("step_u").get<double>();
  g.lo_v = j.at("lo_v").get<double>();
  g.hi_v = j.at("hi_v").get<double>();
  g.step_v = j.at("step_v").get<double>();
  g.nodes = j.at("nodes").get<int>();
  g.log_table = j.at("log_table").get<std::vector<double>>();
  return g;
}

}  // namespace slb::detail
