#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "helmex/decision_tree.hpp"
#include "helmex/errors.hpp"
#include "helmex/explanation.hpp"
#include "helmex/helm.hpp"
#include "helmex/lexicon.hpp"
#include "helmex/trace_io.hpp"
#include "helmex/verbalizer.hpp"

namespace py = pybind11;
using namespace helmex;

namespace {

std::string behaviour_name(Behaviour b) { return std::string(to_string(b)); }

py::dict event_as_dict(const ExplanationEvent& ev) {
  py::dict d;
  d["t"] = ev.concept_set.t;
  d["wall"] = to_iso8601(ev.concept_set.wall);
  d["behaviour"] = behaviour_name(ev.concept_set.behaviour);
  d["previous"] = ev.previous ? py::object(py::str(behaviour_name(*ev.previous)))
                              : py::object(py::none());
  d["trigger"] = std::string(to_string(ev.trigger));
  d["confidence"] = ev.concept_set.confidence;
  py::list conds;
  for (const Condition& c : ev.concept_set.causality) {
    py::dict jc;
    jc["feature"] = c.feature;
    jc["relation"] = std::string(to_string(c.relation));
    if (c.numeric)
      jc["value"] = c.number;
    else
      jc["value"] = c.category;
    jc["unit"] = c.unit;
    jc["stale"] = c.stale;
    conds.append(jc);
  }
  d["conditions"] = conds;
  d["sentence"] = ev.sentence ? py::object(py::str(*ev.sentence)) : py::object(py::none());
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "decision-tree distillation and explanation of a behaviour-based vehicle autonomy";

  py::register_exception<SchemaMismatchError>(m, "SchemaMismatchError");

  py::class_<VehicleState>(m, "VehicleState")
      .def(py::init<>())
      .def_readwrite("t", &VehicleState::t)
      .def_readwrite("x", &VehicleState::x)
      .def_readwrite("y", &VehicleState::y)
      .def_readwrite("depth", &VehicleState::depth)
      .def_readwrite("speed", &VehicleState::speed)
      .def_readwrite("heading", &VehicleState::heading)
      .def_readwrite("battery", &VehicleState::battery)
      .def_readwrite("objective_id", &VehicleState::objective_id)
      .def_readwrite("objective_complete", &VehicleState::objective_complete)
      .def_readwrite("obstacle_range", &VehicleState::obstacle_range)
      .def_readwrite("in_exclusion_zone", &VehicleState::in_exclusion_zone)
      .def_readwrite("gps_fix_age", &VehicleState::gps_fix_age)
      .def("__repr__", [](const VehicleState& s) {
        std::ostringstream os;
        os << "<VehicleState t=" << s.t << " battery=" << s.battery << ">";
        return os.str();
      });

  py::class_<TraceRecord>(m, "TraceRecord")
      .def_readonly("state", &TraceRecord::state)
      .def_property_readonly(
          "behaviour", [](const TraceRecord& r) { return behaviour_name(r.behaviour); })
      .def("to_line", [](const TraceRecord& r) { return serialize_trace_record(r); });

  py::class_<FitParams>(m, "FitParams")
      .def(py::init<>())
      .def_readwrite("max_depth", &FitParams::max_depth)
      .def_readwrite("min_samples_leaf", &FitParams::min_samples_leaf)
      .def_readwrite("min_impurity_decrease", &FitParams::min_impurity_decrease);

  py::class_<DecisionTree>(m, "DecisionTree")
      .def_property_readonly("depth", &DecisionTree::depth)
      .def_property_readonly("leaf_count", &DecisionTree::leaf_count)
      .def("to_json", [](const DecisionTree& t) { return serialize_tree(t); })
      .def_static("from_json",
                  [](const std::string& text) { return deserialize_tree(text); })
      .def("save", [](const DecisionTree& t, const std::string& path) { save_tree(path, t); })
      .def_static("load", [](const std::string& path) { return load_tree(path); });

  py::class_<Scenario>(m, "Scenario")
      .def_readwrite("seed", &Scenario::seed)
      .def_readwrite("dt", &Scenario::dt)
      .def_readwrite("max_duration", &Scenario::max_duration);

  m.def("load_scenario", &load_scenario, py::arg("path"));
  m.def("parse_scenario", &parse_scenario, py::arg("text"));
  m.def(
      "run_mission",
      [](const Scenario& sc) {
        RunMeta meta;
        auto trace = run_mission(sc, &meta);
        return py::make_tuple(trace,
                              py::dict(py::arg("timed_out") = meta.timed_out,
                                       py::arg("mission_complete") = meta.mission_complete,
                                       py::arg("ticks") = meta.ticks));
      },
      py::arg("scenario"));

  m.def("parse_trace_line", [](const std::string& line) { return parse_trace_record(line); });
  m.def("read_trace", &read_trace_file, py::arg("path"));
  m.def("write_trace", &write_trace_file, py::arg("path"), py::arg("records"));

  m.def(
      "fit_tree",
      [](const std::vector<TraceRecord>& records, const FitParams& params) {
        return fit_tree(build_training_set(records), params);
      },
      py::arg("records"), py::arg("params") = FitParams{});
  m.def(
      "predict",
      [](const DecisionTree& tree, const VehicleState& state) {
        const Prediction p = predict(tree, featurize(state));
        return py::make_tuple(behaviour_name(p.label), p.confidence);
      },
      py::arg("tree"), py::arg("state"));
  m.def(
      "fidelity",
      [](const DecisionTree& tree, const std::vector<TraceRecord>& records) {
        return fidelity(tree, std::span<const TraceRecord>(records));
      },
      py::arg("tree"), py::arg("records"));

  m.def(
      "explain_trace",
      [](const DecisionTree& tree, const std::vector<TraceRecord>& records,
         const std::string& lexicon_path, const std::string& time_mode, int min_dwell) {
        const Lexicon lexicon =
            lexicon_path.empty() ? Lexicon::defaults() : Lexicon::load(lexicon_path);
        lexicon.ensure_covers(tree.schema());
        const TimeMode mode = time_mode == "wall" ? TimeMode::Wall : TimeMode::Mission;
        std::vector<VehicleState> states;
        states.reserve(records.size());
        for (const TraceRecord& r : records) states.push_back(r.state);
        py::list out;
        for (ExplanationEvent& ev : detect_events(states, tree, min_dwell)) {
          ev.sentence = realize(ev.concept_set, lexicon, mode).text;
          out.append(event_as_dict(ev));
        }
        return out;
      },
      py::arg("tree"), py::arg("records"), py::arg("lexicon_path") = std::string(),
      py::arg("time_mode") = "mission", py::arg("min_dwell") = 1);

  m.def("format_time", [](double mission_seconds, const std::string& mode) {
    return format_time(mission_seconds, WallTime{}, mode == "wall" ? TimeMode::Wall
                                                                   : TimeMode::Mission);
  });
}
