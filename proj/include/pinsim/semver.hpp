#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace pinsim {

// Parsed semantic version. Ordering follows semver 2.0.0: the numeric triple
// compares first, a prerelease sorts below the same release triple, and
// prerelease identifiers compare field by field (numeric below alphanumeric).
// Build metadata is kept verbatim but ignored by comparison and equality.
struct Version {
    std::uint64_t major = 0;
    std::uint64_t minor = 0;
    std::uint64_t patch = 0;
    std::vector<std::string> prerelease;
    std::string build;

    // Accepts an optional leading "v". Throws ParseError (with byte offset)
    // on malformed input.
    static Version parse(std::string_view text);
    static std::optional<Version> try_parse(std::string_view text);

    std::string str() const;

    bool is_prerelease() const { return !prerelease.empty(); }
    bool same_triple(const Version& other) const {
        return major == other.major && minor == other.minor && patch == other.patch;
    }

    // <0, 0, >0; build metadata ignored.
    static int compare(const Version& a, const Version& b);

    friend bool operator==(const Version& a, const Version& b) { return compare(a, b) == 0; }
    friend bool operator!=(const Version& a, const Version& b) { return compare(a, b) != 0; }
    friend bool operator<(const Version& a, const Version& b) { return compare(a, b) < 0; }
    friend bool operator<=(const Version& a, const Version& b) { return compare(a, b) <= 0; }
    friend bool operator>(const Version& a, const Version& b) { return compare(a, b) > 0; }
    friend bool operator>=(const Version& a, const Version& b) { return compare(a, b) >= 0; }
};

// Five-way constraint taxonomy. The class is decided by the shape of the
// desugared range, never by the source syntax: any range equal to
// [x.y.z, (x+1).0.0) is floating-minor even when written with explicit
// comparators.
enum class ConstraintClass {
    FloatingMajor, // upper-unbounded (">=5.0.0", "*")
    FloatingMinor, // caret shape: [x.y.z, (x+1).0.0)
    FloatingPatch, // tilde shape: [x.y.z, x.(y+1).0)
    Pinned,        // exactly one release version can match
    Other,         // unions, git/file/URL sources, unparseable, odd ranges
};

bool is_floating(ConstraintClass c);
std::string_view to_string(ConstraintClass c);
std::optional<ConstraintClass> constraint_class_from_string(std::string_view name);

enum class CompareOp { Eq, Lt, Le, Gt, Ge };

struct Comparator {
    CompareOp op = CompareOp::Eq;
    Version version;
};

// A version range: disjunction of conjunctions of comparator atoms. Caret,
// tilde, x-range, hyphen and bare-version sugar is desugared at parse time,
// e.g. "^8.3.5" becomes >=8.3.5 <9.0.0 and "~1.21.0" becomes >=1.21.0 <1.22.0.
//
// Parsing never fails by default: unrecognized specifiers (git/file/URL,
// garbage) produce kind == Other with an empty range that satisfies no
// version. Strict mode turns those into hard ParseErrors for fixture
// authoring.
struct VersionConstraint {
    std::string source;
    std::vector<std::vector<Comparator>> ranges;
    ConstraintClass kind = ConstraintClass::Other;

    static VersionConstraint parse(std::string_view text, bool strict = false);
    static VersionConstraint exact(const Version& v);

    bool satisfied_by(const Version& v) const;

    // Inclusive lower bound of a single-conjunction range, when one exists.
    // This is the version the pin transform freezes caret/tilde ranges to.
    std::optional<Version> lower_bound() const;

    friend bool operator==(const VersionConstraint& a, const VersionConstraint& b) {
        return a.source == b.source;
    }
};

// True iff v lies in c's desugared range. Prerelease versions satisfy a
// conjunction only when some comparator in it carries a prerelease with the
// same (major,minor,patch) triple (npm rule).
bool satisfies(const Version& v, const VersionConstraint& c);

// Recomputes the class from the desugared range shape.
ConstraintClass classify(const VersionConstraint& c);

} // namespace pinsim
