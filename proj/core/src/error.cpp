#include "fcforge/error.h"

namespace fcforge {

const char * to_string(error_kind kind) {
    switch (kind) {
        case error_kind::input:         return "input_error";
        case error_kind::config:        return "config_error";
        case error_kind::sampling:      return "sampling_error";
        case error_kind::serialization: return "serialization_error";
        case error_kind::internal:      return "internal_error";
    }
    return "internal_error";
}

} // namespace fcforge
