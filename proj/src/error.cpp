#include "mvsp/error.hpp"

#include <atomic>
#include <iostream>

namespace mvsp {

namespace {

void default_sink(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

std::atomic<WarningSink> current_sink{&default_sink};

}  // namespace

void set_warning_sink(WarningSink sink) { current_sink.store(sink ? sink : &default_sink); }

void warn(const std::string& message) { current_sink.load()(message); }

}  // namespace mvsp
