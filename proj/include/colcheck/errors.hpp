#pragma once

#include <stdexcept>
#include <string>

namespace colcheck {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// geometry
struct DegenerateTriangle : Error { using Error::Error; };
struct EmptyMesh : Error { using Error::Error; };
struct MismatchedBvh : Error { using Error::Error; };

// shared
struct DimensionMismatch : Error { using Error::Error; };
struct IoError : Error { using Error::Error; };
struct FormatError : Error { using Error::Error; };

// neuralnet
struct UnknownPreset : Error { using Error::Error; };
struct EmptyDataset : Error { using Error::Error; };
struct NonFiniteLoss : Error { using Error::Error; };

// dataset
struct ClassStarvation : Error { using Error::Error; };

// baselines
struct SingleClassData : Error { using Error::Error; };
struct SingularCovariance : Error { using Error::Error; };

} // namespace colcheck
