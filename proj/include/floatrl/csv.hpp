// Copyright 2026 The floatrl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef FLOATRL_CSV_HPP_
#define FLOATRL_CSV_HPP_

#include <fstream>
#include <string>
#include <vector>

namespace floatrl {

// Numeric CSV writer. Doubles are printed with %.17g so logs round-trip
// bit-exactly and reruns of a seeded run diff clean.
class CsvWriter {
 public:
  CsvWriter(const std::string& path, const std::vector<std::string>& columns);

  void row(const std::vector<double>& values);

 private:
  std::ofstream out_;
  std::size_t n_columns_;
};

struct CsvTable {
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;

  int column_index(const std::string& name) const;
};

CsvTable read_csv(const std::string& path);

}  // namespace floatrl

#endif  // FLOATRL_CSV_HPP_
