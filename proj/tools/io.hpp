#ifndef TWOMIX_TOOLS_IO_HPP
#define TWOMIX_TOOLS_IO_HPP

#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "twomix/core.hpp"

namespace twomix::cli {

/// I/O or parse failure; maps to exit code 2.
class InputError : public std::runtime_error {
public:
    using Field = std::pair<std::string, std::string>;

    InputError(std::string kind, const std::string& message, std::vector<Field> fields = {})
        : std::runtime_error(message), kind_(std::move(kind)), fields_(std::move(fields)) {}

    const std::string& kind() const { return kind_; }
    const std::vector<Field>& fields() const { return fields_; }

private:
    std::string kind_;
    std::vector<Field> fields_;
};

/**
 * Reads a delimited table with a header row (gene id column then two value
 * columns). Tab vs comma is detected from the header line.
 *
 * Validation failures (negative values, duplicate ids, ...) propagate as twomix::Error.
 */
ExpressionMatrix read_expression_table(const std::filesystem::path& path, AxisKind axis = AxisKind::samples);

/// Shortest round-trip decimal text for a double; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double v);

std::string format_table(const std::vector<std::string>& ids, const std::vector<Row>& rows,
                         const std::string& col1, const std::string& col2);

/// Writes `contents` to a sibling temp file and renames it into place.
void write_atomic(const std::filesystem::path& path, const std::string& contents);

std::string read_text(const std::filesystem::path& path);

nlohmann::json read_json(const std::filesystem::path& path);

/// JSON number, or a string for non-finite values (JSON has no infinity).
nlohmann::json json_number(double v);
double json_to_double(const nlohmann::json& j);

nlohmann::json mixing_to_json(const MixingMatrix& a);
MixingMatrix mixing_from_json(const nlohmann::json& j, MixingForm form);

} // namespace twomix::cli

#endif
