#include "ehdc/scenario_io.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

namespace ehdc::io {

using nlohmann::json;

namespace {

const std::pair<const char*, Role> kRoles[] = {
    {"tx", Role::Tx},   {"rx", Role::Rx},   {"relay", Role::Relay},
    {"tx1", Role::Tx1}, {"tx2", Role::Tx2}, {"rx1", Role::Rx1},
    {"rx2", Role::Rx2},
};

Topology parse_topology(const std::string& name) {
  for (Topology t : {Topology::SingleUser, Topology::TwoHop, Topology::Mac,
                     Topology::Bc}) {
    if (to_string(t) == name) return t;
  }
  throw ParseError("unknown topology '" + name + "'");
}

double number(const json& obj, const char* key) {
  if (!obj.contains(key)) {
    throw ParseError(std::string("missing field '") + key + "'");
  }
  if (!obj[key].is_number()) {
    throw ParseError(std::string("field '") + key + "' must be a number");
  }
  return obj[key].get<double>();
}

std::vector<double> numbers(const json& v, const std::string& what) {
  if (!v.is_array()) throw ParseError(what + " must be an array of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ParseError(what + " must hold numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

LinkModel parse_link(const json& doc) {
  LogBase base = LogBase::Natural;
  if (doc.contains("rate_function")) {
    const json& rf = doc["rate_function"];
    if (!rf.is_object()) throw ParseError("rate_function must be an object");
    const std::string b = rf.value("log_base", "natural");
    if (b == "natural") {
      base = LogBase::Natural;
    } else if (b == "base2") {
      base = LogBase::Base2;
    } else {
      throw ParseError("unknown log_base '" + b + "'");
    }
  }
  DecodingFunction dec = DecodingFunction::inverse_rate();
  if (doc.contains("decoding")) {
    const json& d = doc["decoding"];
    if (!d.is_object() || !d.contains("kind") || !d["kind"].is_string()) {
      throw ParseError("decoding needs a string 'kind'");
    }
    const std::string kind = d["kind"];
    if (kind == "inverse_g") {
      dec = DecodingFunction::inverse_rate();
    } else if (kind == "linear") {
      dec = DecodingFunction::linear(number(d, "a"), number(d, "b"));
    } else if (kind == "exponential") {
      dec = DecodingFunction::exponential(number(d, "c"), number(d, "d"),
                                          number(d, "e"));
    } else {
      throw ParseError("unknown decoding kind '" + kind + "'");
    }
  }
  return LinkModel(RateFunction(base), dec);
}

}  // namespace

Scenario parse_scenario(const json& doc) {
  if (!doc.is_object()) throw ParseError("scenario must be a JSON object");
  if (!doc.contains("topology") || !doc["topology"].is_string()) {
    throw ParseError("missing string field 'topology'");
  }
  Scenario s;
  s.topology = parse_topology(doc["topology"]);
  if (!doc.contains("energy") || !doc["energy"].is_object()) {
    throw ParseError("missing object field 'energy'");
  }
  for (const auto& [key, value] : doc["energy"].items()) {
    const auto it = std::find_if(std::begin(kRoles), std::end(kRoles),
                                 [&](const auto& r) { return key == r.first; });
    if (it == std::end(kRoles)) throw ParseError("unknown role '" + key + "'");
    s.energy.emplace(it->second, EnergyProfile(numbers(value, "energy." + key)));
  }
  s.link = parse_link(doc);
  if (doc.contains("sigma2")) s.bc_noise_sigma2 = number(doc, "sigma2");
  if (doc.contains("rx_has_battery")) {
    if (!doc["rx_has_battery"].is_boolean()) {
      throw ParseError("rx_has_battery must be a boolean");
    }
    s.rx_has_battery = doc["rx_has_battery"].get<bool>();
  }
  if (doc.contains("slots") && !doc["slots"].is_number_unsigned()) {
    throw ParseError("slots must be a positive integer");
  }
  return s;
}

Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open '" + path + "'");
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("'" + path + "': " + e.what());
  }
  return parse_scenario(doc);
}

std::vector<std::string> scenario_violations(const json& doc,
                                             const Scenario& s) {
  std::vector<std::string> out = check_scenario(s);
  if (doc.contains("slots")) {
    const auto n = doc["slots"].get<std::size_t>();
    for (const auto& [role, e] : s.energy) {
      if (e.size() != n) {
        std::ostringstream msg;
        msg << "energy profile '" << to_string(role) << "' has " << e.size()
            << " slots but the file declares " << n;
        out.push_back(msg.str());
      }
    }
  }
  return out;
}

json to_json(const Scenario& s) {
  json doc;
  doc["topology"] = to_string(s.topology);
  doc["slots"] = s.slots();
  json energy = json::object();
  for (const auto& [role, e] : s.energy) {
    energy[to_string(role)] = std::vector<double>(e.begin(), e.end());
  }
  doc["energy"] = energy;
  doc["rate_function"] = {
      {"log_base",
       s.link.rate_function().base() == LogBase::Natural ? "natural" : "base2"}};
  const DecodingFunction& d = s.link.decoding();
  switch (d.kind()) {
    case DecodingFunction::Kind::InverseRate:
      doc["decoding"] = {{"kind", "inverse_g"}};
      break;
    case DecodingFunction::Kind::Linear:
      doc["decoding"] = {{"kind", "linear"}, {"a", d.a()}, {"b", d.b()}};
      break;
    case DecodingFunction::Kind::Exponential:
      doc["decoding"] = {
          {"kind", "exponential"}, {"c", d.c()}, {"d", d.d()}, {"e", d.e()}};
      break;
  }
  if (s.topology == Topology::Bc) doc["sigma2"] = s.bc_noise_sigma2;
  if (s.topology == Topology::SingleUser) {
    doc["rx_has_battery"] = s.rx_has_battery;
  }
  return doc;
}

oracle::Policies policies_from_json(const json& r, const Scenario& s) {
  oracle::Policies p;
  auto get = [&](const char* key) {
    if (!r.contains(key)) {
      throw ParseError(std::string("result has no '") + key + "'");
    }
    return numbers(r[key], key);
  };
  switch (s.topology) {
    case Topology::SingleUser:
      p.rates = get("rates");
      break;
    case Topology::TwoHop:
      p.rates = get("source_rates");
      p.relay_rates = get("relay_rates");
      break;
    case Topology::Mac:
      p.p1 = get("p1");
      p.p2 = get("p2");
      p.mode = r.value("mode", "simultaneous") == "successive"
                   ? DecodingMode::Successive
                   : DecodingMode::Simultaneous;
      p.decoded_last = r.value("decoded_last", 1);
      break;
    case Topology::Bc:
      p.p1 = get("p_t");
      p.p2 = get("p_2");
      break;
  }
  return p;
}

}  // namespace ehdc::io
