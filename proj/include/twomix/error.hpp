#ifndef TWOMIX_ERROR_HPP
#define TWOMIX_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace twomix {

/// Every recoverable failure raised by the library.
enum class ErrorKind {
    NegativeValue,
    NonFiniteValue,
    DuplicateGeneId,
    ShapeMismatch,
    SingularMixing,
    NegativeEntry,
    RowSumViolation,
    AllZeroColumn,
    EmptyAfterFilter,
    TooFewMarkers,
    DegenerateSector,
    EmptyMarkerSet,
    ZeroNormMarker,
    NegativeScale,
    ZeroProportion,
    ZeroVariance,
    LengthMismatch,
    SingleClass,
    ConfigInvalid,
};

std::string_view error_name(ErrorKind kind);

/**
 * Exception carrying a machine-readable kind plus the named values that
 * located the failure (row/col, determinant, offending id, ...).
 */
class Error : public std::runtime_error {
public:
    using Field = std::pair<std::string, std::string>;

    Error(ErrorKind kind, std::string message, std::vector<Field> fields = {})
        : std::runtime_error(std::move(message)), kind_(kind), fields_(std::move(fields)) {}

    ErrorKind kind() const { return kind_; }
    const std::vector<Field>& fields() const { return fields_; }

    /// Value of a named field, or empty if absent.
    std::string field(std::string_view name) const {
        for (const auto& [k, v] : fields_) {
            if (k == name) {
                return v;
            }
        }
        return {};
    }

private:
    ErrorKind kind_;
    std::vector<Field> fields_;
};

} // namespace twomix

#endif
