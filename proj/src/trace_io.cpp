#include <fstream>
#include <sstream>

#include "cei/harness.hpp"

namespace cei {

namespace {

nlohmann::json vec_to_json(const Vec& v) {
  nlohmann::json a = nlohmann::json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
  return a;
}

Vec vec_from_json(const nlohmann::json& a) {
  Vec v(a.size());
  for (std::size_t i = 0; i < a.size(); ++i) v[i] = a[i].get<double>();
  return v;
}

template <typename T>
nlohmann::json opt_json(const std::optional<T>& v) {
  if (!v) return nullptr;
  return *v;
}

}  // namespace

void write_trace_jsonl(const RegretTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot open " + path + " for writing");

  nlohmann::json meta;
  meta["type"] = "meta";
  meta["problem"] = trace.problem_meta;
  meta["trial"] = trace.trial_index;
  meta["seed"] = trace.seed;
  meta["n_initial"] = trace.n_initial;
  meta["f_star"] = opt_json(trace.f_star);
  meta["f_star_estimated"] = trace.f_star_estimated;
  meta["b_f"] = opt_json(trace.b_f);
  meta["b_c"] = opt_json(trace.b_c);
  meta["m_f"] = opt_json(trace.m_f);
  meta["m_c"] = opt_json(trace.m_c);
  meta["model_kernel_f"] = trace.model_kernel_f
                               ? kernel_to_json(*trace.model_kernel_f)
                               : nlohmann::json(nullptr);
  meta["first_feasible_iteration"] = opt_json(trace.first_feasible_iteration);
  meta["incumbent_after_init"] = opt_json(trace.incumbent_after_init);
  meta["failed"] = trace.failed;
  meta["failure"] = trace.failure;
  meta["wall_clock_seconds"] = trace.wall_clock_seconds;
  out << meta.dump() << '\n';

  for (const auto& rec : trace.initial) {
    nlohmann::json j;
    j["type"] = "init";
    j["x"] = vec_to_json(rec.x);
    j["f"] = rec.f;
    j["c"] = rec.c;
    j["feasible"] = rec.feasible;
    out << j.dump() << '\n';
  }
  for (const auto& rec : trace.iters) {
    nlohmann::json j;
    j["type"] = "iter";
    j["t"] = rec.t;
    j["x"] = vec_to_json(rec.x);
    j["f"] = rec.f;
    j["c"] = rec.c;
    j["feasible"] = rec.feasible;
    j["f_plus"] = opt_json(rec.f_plus);
    j["regret"] = opt_json(rec.regret);
    j["acq"] = rec.acq_value;
    j["sigma_f"] = rec.sigma_f_at_next;
    j["mu_f"] = rec.mu_f_at_next;
    j["jitter"] = rec.jitter_used;
    j["clamp_events"] = rec.clamp_events;
    j["candidate_index"] = rec.candidate_index;
    out << j.dump() << '\n';
  }
  if (!out) throw IoError("write failed for " + path);
}

RegretTrace read_trace_jsonl(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  RegretTrace trace;
  std::string line;
  bool have_meta = false;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const nlohmann::json j = nlohmann::json::parse(line);
    const std::string type = j.at("type").get<std::string>();
    if (type == "meta") {
      have_meta = true;
      trace.problem_meta = j.at("problem");
      trace.trial_index = j.at("trial").get<int>();
      trace.seed = j.at("seed").get<std::uint64_t>();
      trace.n_initial = j.at("n_initial").get<int>();
      if (!j.at("f_star").is_null()) trace.f_star = j.at("f_star").get<double>();
      trace.f_star_estimated = j.at("f_star_estimated").get<bool>();
      if (!j.at("b_f").is_null()) trace.b_f = j.at("b_f").get<double>();
      if (!j.at("b_c").is_null()) {
        trace.b_c = j.at("b_c").get<std::vector<double>>();
      }
      if (!j.at("m_f").is_null()) trace.m_f = j.at("m_f").get<double>();
      if (!j.at("m_c").is_null()) {
        trace.m_c = j.at("m_c").get<std::vector<double>>();
      }
      if (!j.at("model_kernel_f").is_null()) {
        trace.model_kernel_f = kernel_from_json(j.at("model_kernel_f"));
      }
      if (!j.at("first_feasible_iteration").is_null()) {
        trace.first_feasible_iteration =
            j.at("first_feasible_iteration").get<int>();
      }
      if (!j.at("incumbent_after_init").is_null()) {
        trace.incumbent_after_init = j.at("incumbent_after_init").get<double>();
      }
      trace.failed = j.at("failed").get<bool>();
      trace.failure = j.at("failure").get<std::string>();
      trace.wall_clock_seconds = j.at("wall_clock_seconds").get<double>();
    } else if (type == "init") {
      InitialRecord rec;
      rec.x = vec_from_json(j.at("x"));
      rec.f = j.at("f").get<double>();
      rec.c = j.at("c").get<std::vector<double>>();
      rec.feasible = j.at("feasible").get<bool>();
      trace.initial.push_back(std::move(rec));
    } else if (type == "iter") {
      IterationRecord rec;
      rec.t = j.at("t").get<int>();
      rec.x = vec_from_json(j.at("x"));
      rec.f = j.at("f").get<double>();
      rec.c = j.at("c").get<std::vector<double>>();
      rec.feasible = j.at("feasible").get<bool>();
      if (!j.at("f_plus").is_null()) rec.f_plus = j.at("f_plus").get<double>();
      if (!j.at("regret").is_null()) rec.regret = j.at("regret").get<double>();
      rec.acq_value = j.at("acq").get<double>();
      rec.sigma_f_at_next = j.at("sigma_f").get<double>();
      rec.mu_f_at_next = j.at("mu_f").get<double>();
      rec.jitter_used = j.at("jitter").get<double>();
      rec.clamp_events = j.at("clamp_events").get<long>();
      rec.candidate_index = j.at("candidate_index").get<long>();
      trace.iters.push_back(std::move(rec));
    } else {
      throw IoError("unknown record type '" + type + "' in " + path);
    }
  }
  if (!have_meta) throw IoError("missing meta record in " + path);
  return trace;
}

}  // namespace cei
