#ifndef TAGKG_IO_UTIL_H_
#define TAGKG_IO_UTIL_H_

#include <string>
#include <string_view>
#include <vector>

namespace tagkg {

// Reads a whole file. Throws Error if it cannot be opened.
std::string ReadFile(const std::string &path);

// Writes atomically enough for our purposes: truncate + write + check.
void WriteFile(const std::string &path, std::string_view contents);

// Splits on LF; a trailing CR on each line is stripped. The final empty
// segment after a terminating newline is dropped.
std::vector<std::string> SplitLines(std::string_view text);

std::vector<std::string> Split(std::string_view text, char sep);

std::string Trim(std::string_view s);
std::string ToLower(std::string_view s);

// Shortest decimal form that parses back to the same double.
std::string FormatDouble(double v);
double ParseDouble(std::string_view s);

bool FileExists(const std::string &path);
void MakeDirs(const std::string &path);
std::string JoinPath(const std::string &dir, const std::string &name);

}  // namespace tagkg

#endif  // TAGKG_IO_UTIL_H_
