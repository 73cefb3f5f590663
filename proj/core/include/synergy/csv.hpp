#pragma once

// All file formats are plain CSV with a mandatory header row. Probability
// cells are written with 17 significant digits so written files round-trip
// exactly.

#include "synergy/dist_core.hpp"
#include "synergy/synthetic.hpp"

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace synergy {

class CsvError : public std::runtime_error {
public:
  explicit CsvError(const std::string& what) : std::runtime_error(what) {}
};

// header x1,x2,y,p; one row per nonzero cell; omitted cells are zero;
// dimensions inferred from the largest index seen.
DiscreteJoint read_joint_csv(const std::string& path);
void write_joint_csv(const std::string& path, const DiscreteJoint& j);

// header <a>,<b>,p (e.g. x1,y,p); same conventions as the joint format.
Eigen::MatrixXd read_marginal_csv(const std::string& path, const std::string& a,
                                  const std::string& b);
void write_marginal_csv(const std::string& path, const Eigen::MatrixXd& m,
                        const std::string& a, const std::string& b);

// header i,p: a bare probability vector.
MarginalDistribution read_distribution_csv(const std::string& path);
void write_distribution_csv(const std::string& path, const MarginalDistribution& p);

// header i,j,p: a coupling matrix in sparse triplet form.
void write_coupling_csv(const std::string& path, const Eigen::MatrixXd& matrix);

// header idx,S,s_agree,s_disagree,s_upper,alpha,r,u1,u2; failed samples are
// omitted (their count lives in the report summary).
void write_sweep_csv(const std::string& path, const SweepReport& report);

// header id,f0,...,fd. ids are opaque strings without commas.
struct FeatureTable {
  std::vector<std::string> ids;
  std::vector<Eigen::VectorXd> rows;
};
FeatureTable read_features_csv(const std::string& path);

// header id,y with integer labels.
struct LabelTable {
  std::vector<std::string> ids;
  std::vector<long long> labels;
};
LabelTable read_labels_csv(const std::string& path);

// header id1,id2.
std::vector<std::pair<std::string, std::string>> read_pairs_csv(const std::string& path);

}  // namespace synergy
