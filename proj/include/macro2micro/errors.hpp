#pragma once

#include <stdexcept>
#include <string>

namespace m2m {

// Base class for all library errors. `code()` is a stable machine-readable
// identifier used by the CLI's error records; `what()` carries the detail.
class Error : public std::runtime_error {
 public:
  Error(std::string code, const std::string& message)
      : std::runtime_error(message), code_(std::move(code)) {}
  const std::string& code() const { return code_; }

 private:
  std::string code_;
};

#define M2M_DEFINE_ERROR(Name, code_literal)                      \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& message)                     \
        : Error(code_literal, message) {}                         \
  }

M2M_DEFINE_ERROR(MissingFile, "missing_file");
M2M_DEFINE_ERROR(MalformedVolume, "malformed_volume");
M2M_DEFINE_ERROR(AllNonFinite, "all_non_finite");
M2M_DEFINE_ERROR(IndexOutOfRange, "index_out_of_range");
M2M_DEFINE_ERROR(OddSpatialDims, "odd_spatial_dims");
M2M_DEFINE_ERROR(ShapeMismatch, "shape_mismatch");
M2M_DEFINE_ERROR(EmptyReferenceSet, "empty_reference_set");
M2M_DEFINE_ERROR(VersionMismatch, "version_mismatch");
M2M_DEFINE_ERROR(MalformedCheckpoint, "malformed_checkpoint");
M2M_DEFINE_ERROR(NonFiniteLoss, "non_finite_loss");
M2M_DEFINE_ERROR(NonFiniteComponent, "non_finite_component");
M2M_DEFINE_ERROR(EmptyDataset, "empty_dataset");
M2M_DEFINE_ERROR(EmptyMask, "empty_mask");
M2M_DEFINE_ERROR(DegenerateData, "degenerate_data");
M2M_DEFINE_ERROR(DegenerateLabels, "degenerate_labels");
M2M_DEFINE_ERROR(ConfigInvalid, "config_invalid");
M2M_DEFINE_ERROR(ExtractorUnavailable, "extractor_unavailable");

#undef M2M_DEFINE_ERROR

}  // namespace m2m
