#include "bnshift/ground_truth.hpp"

#include <string>

#include "bnshift/errors.hpp"

namespace bnshift {

void GroundTruth::validate() const {
  for (std::size_t i = 0; i < change_points.size(); ++i) {
    if (i == 0 && change_points[i] == 0) {
      throw ValidationError("first change point must be greater than 0");
    }
    if (i > 0 && change_points[i] <= change_points[i - 1]) {
      throw ValidationError("change points must be strictly increasing; " +
                            std::to_string(change_points[i]) + " follows " +
                            std::to_string(change_points[i - 1]));
    }
  }
  for (std::size_t i = 1; i < labels.size(); ++i) {
    if (labels[i].start <= labels[i - 1].start) {
      throw ValidationError("domain label starts must be strictly increasing");
    }
  }
}

}  // namespace bnshift
