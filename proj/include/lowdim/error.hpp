#ifndef LOWDIM_ERROR_HPP
#define LOWDIM_ERROR_HPP

#include <stdexcept>
#include <string>

namespace lowdim {

/// Raised for every recoverable failure surfaced by the toolkit (bad input,
/// violated preconditions, numerical breakdown). The message is user-facing.
class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lowdim

#endif
