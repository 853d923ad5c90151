#pragma once

namespace tao {

/// Selects between the serial reference path and the OpenMP path of a kernel.
/// Both paths produce bit-identical results.
enum class Exec { serial, parallel };

}  // namespace tao
