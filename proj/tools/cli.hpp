#pragma once

#include <ostream>
#include <string>
#include <vector>

#include "stieltjes/measure.hpp"

namespace stieltjes::cli {

// Measure literal: zero, lebesgue[:s], atom:x:w, density:[c0,c1,...][:lo:hi],
// ramp:m, osc:m, random:seed[:tv], sums joined by '+', or a JSON file path.
Measure parse_measure(const std::string& text);

// "2", "-1.5", "3i", "2-0.5i", "i"
Complex parse_complex(const std::string& text);

std::string format_complex(Complex z);

// Exit code for an error code string: 2 input, 3 numerical, 4 inconsistency.
int exit_code_for(const std::string& code);

// Runs one command line (args exclude the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace stieltjes::cli
