#include "sdm/linear/export.hpp"

#include <fstream>
#include <iomanip>

#include "sdm/error.hpp"

namespace sdm::linear {

void write_coefficients(const std::filesystem::path& path, const std::vector<std::string>& station_ids,
                        const std::vector<spatial::Point>& locations, const Eigen::MatrixXd& beta,
                        const Eigen::MatrixXd& se, const Eigen::MatrixXd& tvalues,
                        const SignificanceReport& report) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << std::setprecision(17);
  out << "station_id,x,y,term,beta,se,t,significant\n";
  for (Eigen::Index i = 0; i < beta.rows(); ++i) {
    const auto r = static_cast<std::size_t>(i);
    for (Eigen::Index j = 0; j < beta.cols(); ++j) {
      const auto& term = report.terms[static_cast<std::size_t>(j)];
      out << station_ids[r] << ',' << locations[r].x << ',' << locations[r].y << ',' << term.name
          << ',' << beta(i, j) << ',' << se(i, j) << ',' << tvalues(i, j) << ','
          << (term.significant[r] ? 1 : 0) << '\n';
    }
  }
}

void write_significance(const std::filesystem::path& path, const SignificanceReport& report,
                        const std::vector<std::string>& bandwidth_labels) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::io, "cannot write " + path.string());
  out << std::setprecision(10);
  out << "Feature,Mean,STD,Min,Median,Max,Mean t,STD t,Adjusted Alpha,Significant Estimates [%]";
  if (!bandwidth_labels.empty()) out << ",BW";
  out << '\n';
  for (std::size_t j = 0; j < report.terms.size(); ++j) {
    const auto& t = report.terms[j];
    out << t.name << ',' << t.mean << ',' << t.sd << ',' << t.min << ',' << t.median << ','
        << t.max << ',' << t.t_mean << ',' << t.t_sd << ',' << t.adjusted_alpha << ','
        << t.percent_significant;
    if (!bandwidth_labels.empty()) out << ',' << bandwidth_labels.at(j);
    out << '\n';
  }
}

}  // namespace sdm::linear
