#pragma once

#include <stdexcept>
#include <string>

namespace gridres {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// grid-core
struct SingularSystem : Error { using Error::Error; };

// environment
struct SteppedAfterDone : Error { using Error::Error; };
struct InvalidLineId : Error { using Error::Error; };

// metrics
struct ZeroScheduledDemand : Error { using Error::Error; };
struct InvalidPartition : Error { using Error::Error; };

// neural-net
struct ShapeMismatch : Error { using Error::Error; };
struct NoForwardRecorded : Error { using Error::Error; };

// lowrank
struct ConvergenceFailure : Error { using Error::Error; };
struct InvalidSpec : Error { using Error::Error; };

// io / config
struct ConfigError : Error { using Error::Error; };
struct IncompatibleCheckpoint : Error { using Error::Error; };

}  // namespace gridres
