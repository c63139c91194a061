#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <sstream>

#include "commands.hpp"
#include "humor/corpus.hpp"
#include "humor/error.hpp"
#include "humor/evaluation.hpp"
#include "humor/markov.hpp"
#include "humor/template.hpp"

namespace py = pybind11;
using namespace humor;

namespace {

TokenLevel level_from(const std::string& name) { return parse_token_level(name); }

std::vector<TokenSeq> tokenize_all(const std::vector<std::string>& texts, TokenLevel level, bool lowercase) {
  std::vector<TokenSeq> out;
  out.reserve(texts.size());
  for (const auto& t : texts) out.push_back(tokenize(clean_text(t), {level, PunctMode::kKeep, lowercase}));
  return out;
}

py::dict metrics_dict(const ClassMetrics& m) {
  py::dict d;
  d["precision"] = m.precision_defined ? py::cast(m.precision) : py::none();
  d["recall"] = m.recall_defined ? py::cast(m.recall) : py::none();
  return d;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
  m.doc() = "Joke corpus processing, n-gram generation, mask scoring and evaluation.";

  auto base = py::register_exception<Error>(m, "HumorError", PyExc_RuntimeError);
  py::register_exception<UsageError>(m, "UsageError", base.ptr());
  py::register_exception<DataError>(m, "DataError", base.ptr());

  m.def("clean_text", [](const std::string& raw) { return clean_text(raw); }, py::arg("raw"));

  m.def(
      "split_setup_punchline",
      [](const std::string& text) {
        const auto s = split_setup_punchline(text);
        py::dict d;
        d["setup"] = s.setup;
        d["separator"] = s.separator;
        d["punchline"] = s.punchline;
        d["rule"] = std::string(to_string(s.rule));
        return d;
      },
      py::arg("text"));

  m.def(
      "tokenize",
      [](const std::string& text, const std::string& level, bool drop_punct, bool lowercase) {
        return tokenize(text, {level_from(level), drop_punct ? PunctMode::kDrop : PunctMode::kKeep, lowercase}).tokens;
      },
      py::arg("text"), py::arg("level") = "word", py::arg("drop_punct") = false, py::arg("lowercase") = false);

  m.def(
      "score_token",
      [](const std::string& category, int rank, int max_rank) { return score_token(category, rank, max_rank, {}); },
      py::arg("category"), py::arg("rank"), py::arg("max_rank"));

  py::class_<NGramModel>(m, "NGramModel")
      .def_static(
          "fit",
          [](const std::vector<std::string>& texts, int n, const std::string& level, bool lowercase) {
            const auto lv = level_from(level);
            return fit_ngram(tokenize_all(texts, lv, lowercase), lv, n);
          },
          py::arg("texts"), py::arg("n") = 3, py::arg("level") = "word", py::arg("lowercase") = true)
      .def_static("load", [](const std::string& path) { return NGramModel::load(path); }, py::arg("path"))
      .def("save", [](const NGramModel& self, const std::string& path) { self.save(path); }, py::arg("path"))
      .def_property_readonly("n", &NGramModel::n)
      .def_property_readonly("level", [](const NGramModel& self) { return std::string(to_string(self.level())); })
      .def_property_readonly("context_count", [](const NGramModel& self) { return self.counts().size(); })
      .def("next_distribution", &NGramModel::next_distribution, py::arg("context"))
      .def(
          "generate",
          [](const NGramModel& self, const std::vector<std::string>& seed_tokens, int max_tokens, std::uint64_t seed,
             bool backoff) {
            return join_tokens(generate(self, seed_tokens, {max_tokens, seed, backoff}), self.level());
          },
          py::arg("seed_tokens") = std::vector<std::string>{}, py::arg("max_tokens") = 50, py::arg("seed") = 0,
          py::arg("backoff") = false);

  m.def(
      "evaluation_report",
      [](std::size_t computer_as_computer, std::size_t computer_as_human, std::size_t human_as_computer,
         std::size_t human_as_human) {
        ConfusionMatrix cm;
        cm.counts[0][0] = computer_as_computer;
        cm.counts[0][1] = computer_as_human;
        cm.counts[1][0] = human_as_computer;
        cm.counts[1][1] = human_as_human;
        const auto r = report(cm);
        py::dict d;
        d["computer"] = metrics_dict(r.computer);
        d["human"] = metrics_dict(r.human);
        d["accuracy"] = r.accuracy;
        d["table"] = r.table();
        return d;
      },
      py::arg("computer_as_computer"), py::arg("computer_as_human"), py::arg("human_as_computer"),
      py::arg("human_as_human"));

  m.def(
      "run_cli",
      [](const std::vector<std::string>& args, const std::string& stdin_text) {
        std::istringstream in(stdin_text);
        std::ostringstream out, err;
        int code = 0;
        {
          py::gil_scoped_release release;
          code = cli::run(args, in, out, err);
        }
        return py::make_tuple(code, out.str(), err.str());
      },
      py::arg("args"), py::arg("stdin") = "");
}
