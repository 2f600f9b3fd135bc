#include "riemkl/trace.hpp"

#include <cstdio>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace riemkl {

namespace {

constexpr const char* kHeader = "iter,f,grad_norm,step,qd_step,dist_step,w_norm,cum_qd";

std::string fmt17(double v) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::vector<double> parse_row(const std::string& line, int expected) {
  std::vector<double> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    out.push_back(std::stod(cell));
  }
  if (static_cast<int>(out.size()) != expected) {
    throw std::runtime_error("trace csv: malformed row: " + line);
  }
  return out;
}

}  // namespace

const char* to_string(SolveStatus s) {
  switch (s) {
    case SolveStatus::kConverged:
      return "converged";
    case SolveStatus::kMaxIters:
      return "max-iters";
    case SolveStatus::kSubproblemFailure:
      return "subproblem-failure";
  }
  return "unknown";
}

double DescentTrace::f_at(int k) const {
  if (k < 0 || k > iterations()) throw std::out_of_range("trace: f_at index");
  return k == iterations() ? final_f : steps[static_cast<std::size_t>(k)].f;
}

double DescentTrace::grad_norm_at(int k) const {
  if (k < 0 || k > iterations()) throw std::out_of_range("trace: grad_norm_at index");
  return k == iterations() ? final_grad_norm : steps[static_cast<std::size_t>(k)].grad_norm;
}

double DescentTrace::sum_qd_steps() const {
  double s = 0.0;
  for (const TraceStep& st : steps) s += st.qd_step;
  return s;
}

void write_trace_csv(std::ostream& os, const DescentTrace& trace) {
  os << kHeader << '\n';
  double cum = 0.0;
  for (std::size_t k = 0; k < trace.steps.size(); ++k) {
    const TraceStep& s = trace.steps[k];
    cum += s.qd_step;
    os << k << ',' << fmt17(s.f) << ',' << fmt17(s.grad_norm) << ',' << fmt17(s.step) << ','
       << fmt17(s.qd_step) << ',' << fmt17(s.dist_step) << ',' << fmt17(s.w_norm) << ','
       << fmt17(cum) << '\n';
  }
  os << trace.steps.size() << ',' << fmt17(trace.final_f) << ',' << fmt17(trace.final_grad_norm)
     << ",0,0,0," << fmt17(trace.final_grad_norm) << ',' << fmt17(cum) << '\n';
}

DescentTrace read_trace_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line != kHeader) {
    throw std::runtime_error("trace csv: missing or unexpected header");
  }
  std::vector<std::vector<double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    rows.push_back(parse_row(line, 8));
  }
  if (rows.empty()) throw std::runtime_error("trace csv: no rows");

  DescentTrace trace;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    const auto& r = rows[k];
    trace.steps.push_back(TraceStep{r[1], r[2], r[3], r[4], r[5], r[6]});
  }
  const auto& last = rows.back();
  trace.final_f = last[1];
  trace.final_grad_norm = last[2];
  trace.status = SolveStatus::kMaxIters;  // status lives in the summary, not the CSV
  return trace;
}

}  // namespace riemkl
