#include "swloc/model.hpp"

namespace swloc::model {

Variant variant_from_string(const std::string& s) {
    if (s == "combined") return Variant::combined;
    if (s == "gcc_only") return Variant::gcc_only;
    if (s == "cepstral_only") return Variant::cepstral_only;
    throw ConfigError("unknown network variant: " + s);
}

std::string to_string(Variant v) {
    switch (v) {
        case Variant::combined: return "combined";
        case Variant::gcc_only: return "gcc_only";
        case Variant::cepstral_only: return "cepstral_only";
    }
    throw ConfigError("bad variant enum");
}

}  // namespace swloc::model
