#pragma once

#include "optidesign/model.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace optidesign {

/// Reads a dataset CSV: header `x1,...,xm[,y]`, one row per run, '.' decimal
/// separator. Errors carry the file name and 1-based line number.
Dataset read_dataset_csv(const std::filesystem::path& path);

void write_dataset_csv(const std::filesystem::path& path, const Dataset& data);

/// Generic table writer; numbers are written with 17 significant digits.
void write_csv(const std::filesystem::path& path, const std::vector<std::string>& header,
               const std::vector<std::vector<double>>& rows);

std::string format_double(double v);

}  // namespace optidesign
