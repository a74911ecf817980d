#include "wpts/config_io.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>
#include <type_traits>

#include "wpts/errors.hpp"

namespace wpts {

namespace {

using nlohmann::json;

json parse_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot read " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  if (in.bad()) throw IoError("failed reading " + path);
  try {
    return json::parse(buffer.str());
  } catch (const json::exception& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

const json& require(const json& obj, const std::string& key,
                    const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end())
    throw ConfigError(where + " is missing required key \"" + key + "\"");
  return *it;
}

template <typename T>
T get_or(const json& obj, const std::string& key, T fallback,
         const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end()) return fallback;
  try {
    return it->get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + " has the wrong type");
  }
}

Eigen::VectorXd as_vector(const json& value, const std::string& where) {
  if (!value.is_array() || value.empty())
    throw ConfigError(where + " must be a non-empty array of numbers");
  Eigen::VectorXd out(value.size());
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (!value[i].is_number())
      throw ConfigError(where + " must contain only numbers");
    out(static_cast<Eigen::Index>(i)) = value[i].get<double>();
  }
  return out;
}

Eigen::MatrixXd as_matrix(const json& value, const std::string& where) {
  if (!value.is_array() || value.empty())
    throw ConfigError(where + " must be a non-empty array of rows");
  const std::size_t cols = value[0].is_array() ? value[0].size() : 0;
  Eigen::MatrixXd out(value.size(), cols);
  for (std::size_t r = 0; r < value.size(); ++r) {
    if (!value[r].is_array() || value[r].size() != cols)
      throw ConfigError(where + " rows must have equal length");
    for (std::size_t c = 0; c < cols; ++c) {
      if (!value[r][c].is_number())
        throw ConfigError(where + " must contain only numbers");
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          value[r][c].get<double>();
    }
  }
  return out;
}

// Scalar or array; scalars come back as a single-entry list.
template <typename T>
std::vector<T> scalar_or_list(const json& value, const std::string& where) {
  std::vector<T> out;
  if (value.is_array()) {
    if (value.empty()) throw ConfigError(where + " must not be empty");
    for (const auto& v : value) {
      if (!v.is_number()) throw ConfigError(where + " must be numeric");
      out.push_back(v.get<T>());
    }
  } else if (value.is_number()) {
    out.push_back(value.get<T>());
  } else {
    throw ConfigError(where + " must be a number or array of numbers");
  }
  return out;
}

std::vector<std::vector<int>> as_id_lists(const json& value,
                                          const std::string& where) {
  if (!value.is_array())
    throw ConfigError(where + " must be an array of id lists");
  std::vector<std::vector<int>> out;
  for (const auto& row : value) {
    if (!row.is_array())
      throw ConfigError(where + " entries must be arrays of ids");
    std::vector<int> ids;
    for (const auto& v : row) {
      if (!v.is_number_integer())
        throw ConfigError(where + " ids must be integers");
      ids.push_back(v.get<int>());
    }
    out.push_back(std::move(ids));
  }
  return out;
}

Topology topology_from_json(const json& doc, const std::string& where) {
  const int n_aps = require(doc, "n_aps", where).get<int>();
  std::vector<std::pair<int, int>> edges;
  for (const auto& e : require(doc, "edges", where)) {
    if (!e.is_array() || e.size() != 2)
      throw ConfigError(where + ".edges entries must be [a, b] pairs");
    edges.emplace_back(e[0].get<int>(), e[1].get<int>());
  }
  auto stations = as_id_lists(require(doc, "stations", where), where + ".stations");
  auto sensors = as_id_lists(require(doc, "sensors", where), where + ".sensors");
  try {
    return make_topology(make_conflict_graph(n_aps, edges),
                         std::move(stations), std::move(sensors));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

}  // namespace

Topology load_topology(const std::string& path) {
  return topology_from_json(parse_file(path), path);
}

void save_topology(const Topology& topology, const std::string& path) {
  json doc;
  doc["n_aps"] = topology.n_aps();
  doc["edges"] = json::array();
  for (int a = 0; a < topology.n_aps(); ++a)
    for (int b = a + 1; b < topology.n_aps(); ++b)
      if (topology.graph.conflict(a, b)) doc["edges"].push_back({a, b});
  doc["stations"] = topology.stations;
  doc["sensors"] = topology.sensors;

  std::ofstream out(path);
  if (!out) throw IoError("cannot open " + path + " for writing");
  out << doc.dump(2) << '\n';
  if (!out.flush()) throw IoError("failed writing " + path);
}

ExperimentConfig load_config(const std::string& path) {
  const json doc = parse_file(path);
  ExperimentConfig cfg;

  if (doc.contains("topology")) {
    const json& topo = doc["topology"];
    if (topo.contains("file")) {
      std::filesystem::path ref = topo["file"].get<std::string>();
      if (ref.is_relative())
        ref = std::filesystem::path(path).parent_path() / ref;
      cfg.topology = load_topology(ref.string());
    } else if (topo.contains("n_aps") && topo.contains("edges")) {
      cfg.topology = topology_from_json(topo, "topology");
    } else {
      cfg.n_aps = get_or(topo, "n_aps", cfg.n_aps, "topology");
      cfg.edge_prob = get_or(topo, "edge_prob", cfg.edge_prob, "topology");
      cfg.max_stations =
          get_or(topo, "max_stations", cfg.max_stations, "topology");
      cfg.max_sensors =
          get_or(topo, "max_sensors", cfg.max_sensors, "topology");
    }
    const std::string enumerator =
        get_or<std::string>(topo, "transmission_sets", "greedy", "topology");
    if (enumerator == "greedy")
      cfg.set_enumerator = SetEnumerator::kGreedy;
    else if (enumerator == "exhaustive")
      cfg.set_enumerator = SetEnumerator::kExhaustive;
    else
      throw ConfigError("topology.transmission_sets must be \"greedy\" or "
                        "\"exhaustive\"");
  }

  const json& channels = require(doc, "channels", path);
  cfg.channels.station_values =
      as_vector(require(channels, "station_values", "channels"),
                "channels.station_values");
  cfg.channels.sensor_values =
      as_vector(require(channels, "sensor_values", "channels"),
                "channels.sensor_values");
  if (channels.contains("station_transition"))
    cfg.channels.station_transition =
        as_matrix(channels["station_transition"], "channels.station_transition");
  if (channels.contains("sensor_transition"))
    cfg.channels.sensor_transition =
        as_matrix(channels["sensor_transition"], "channels.sensor_transition");

  if (doc.contains("arrivals")) {
    const json& arrivals = doc["arrivals"];
    if (arrivals.contains("prob"))
      cfg.arrivals.prob =
          scalar_or_list<double>(arrivals["prob"], "arrivals.prob");
    if (arrivals.contains("batch"))
      cfg.arrivals.batch =
          scalar_or_list<int>(arrivals["batch"], "arrivals.batch");
  }

  if (doc.contains("mdp")) {
    const json& mdp = doc["mdp"];
    cfg.mdp.horizon = get_or(mdp, "T", cfg.mdp.horizon, "mdp");
    cfg.mdp.discount = get_or(mdp, "gamma", cfg.mdp.discount, "mdp");
    cfg.mdp.n_samples = get_or(mdp, "N", cfg.mdp.n_samples, "mdp");
    cfg.mdp.lookahead = get_or(mdp, "H", cfg.mdp.lookahead, "mdp");
    cfg.mdp.weights.data_weight =
        get_or(mdp, "gamma_d", cfg.mdp.weights.data_weight, "mdp");
    cfg.mdp.weights.energy_weight =
        get_or(mdp, "gamma_e", cfg.mdp.weights.energy_weight, "mdp");
  }

  if (doc.contains("dynamics")) {
    const json& dynamics = doc["dynamics"];
    if (dynamics.contains("q_max") && !dynamics["q_max"].is_null())
      cfg.queue_cap = dynamics["q_max"].get<int>();
    cfg.slot_fill_energy = get_or(dynamics, "slot_fill_energy",
                                  cfg.slot_fill_energy, "dynamics");
  }

  if (doc.contains("experiment")) {
    const json& experiment = doc["experiment"];
    cfg.runs = get_or(experiment, "runs", cfg.runs, "experiment");
    if (experiment.contains("policies")) {
      cfg.policies.clear();
      for (const auto& name : experiment["policies"])
        cfg.policies.push_back(parse_policy(name.get<std::string>()));
    }
    if (experiment.contains("sweeps")) {
      const json& sweeps = experiment["sweeps"];
      if (sweeps.contains("arrival"))
        cfg.arrival_sweep =
            scalar_or_list<double>(sweeps["arrival"], "sweeps.arrival");
      if (sweeps.contains("interference"))
        cfg.interference_sweep = scalar_or_list<double>(
            sweeps["interference"], "sweeps.interference");
    }
    if (experiment.contains("gap_horizons"))
      cfg.gap_horizons =
          scalar_or_list<int>(experiment["gap_horizons"], "gap_horizons");
    cfg.gap_seeds = get_or(experiment, "gap_seeds", cfg.gap_seeds, "experiment");
  }

  if (cfg.policies.empty())
    cfg.policies = {PolicyKind::kMaxWeight, PolicyKind::kMaxQueue,
                    PolicyKind::kMaxCsi, PolicyKind::kRandom};

  // surface value errors now rather than mid-experiment
  try {
    make_chain_from(cfg.channels.station_values,
                    cfg.channels.station_transition);
    make_chain_from(cfg.channels.sensor_values, cfg.channels.sensor_transition);
    make_arrivals_for(cfg.arrivals,
                      cfg.topology ? cfg.topology->n_stations()
                                   : static_cast<int>(std::max(
                                         cfg.arrivals.prob.size(),
                                         cfg.arrivals.batch.size())));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + ": " + e.what());
  }
  if (cfg.mdp.horizon < 0) throw ConfigError("mdp.T must be >= 0");
  if (cfg.mdp.discount < 0.0 || cfg.mdp.discount > 1.0)
    throw ConfigError("mdp.gamma must lie in [0, 1]");
  if (cfg.mdp.n_samples < 1) throw ConfigError("mdp.N must be >= 1");
  if (cfg.mdp.lookahead < 1) throw ConfigError("mdp.H must be >= 1");
  if (cfg.mdp.weights.data_weight < 0.0 || cfg.mdp.weights.energy_weight < 0.0)
    throw ConfigError("reward weights must be non-negative");
  if (cfg.runs < 1) throw ConfigError("experiment.runs must be >= 1");
  if (cfg.gap_seeds < 1) throw ConfigError("experiment.gap_seeds must be >= 1");
  if (cfg.queue_cap && *cfg.queue_cap < 0)
    throw ConfigError("dynamics.q_max must be >= 0");
  return cfg;
}

ChannelChain make_chain_from(const Eigen::VectorXd& values,
                             const std::optional<Eigen::MatrixXd>& transition) {
  if (transition) return make_chain(values, *transition);
  return make_uniform_chain(values);
}

ArrivalProcess make_arrivals_for(const ArrivalConfig& cfg, int n_queues) {
  auto spread = [n_queues](const auto& list, const char* what) {
    using Value = typename std::decay_t<decltype(list)>::value_type;
    Eigen::Vector<Value, Eigen::Dynamic> out(n_queues);
    if (list.size() == 1) {
      out.setConstant(list[0]);
    } else if (static_cast<int>(list.size()) == n_queues) {
      for (int j = 0; j < n_queues; ++j) out(j) = list[j];
    } else {
      throw std::invalid_argument(
          std::string(what) +
          " must be a scalar or give one entry per station queue");
    }
    return out;
  };
  return make_bernoulli_arrivals(spread(cfg.prob, "arrival probability"),
                                 spread(cfg.batch, "arrival batch"));
}

SystemModel make_model(const ExperimentConfig& cfg, Topology topology) {
  SystemModel model;
  model.stochastics.station_chain = make_chain_from(
      cfg.channels.station_values, cfg.channels.station_transition);
  model.stochastics.sensor_chain = make_chain_from(
      cfg.channels.sensor_values, cfg.channels.sensor_transition);
  model.stochastics.arrivals =
      make_arrivals_for(cfg.arrivals, topology.n_stations());
  model.queue_cap = cfg.queue_cap;
  model.slot_fill_energy = cfg.slot_fill_energy;
  model.topology = std::move(topology);
  return model;
}

}  // namespace wpts
