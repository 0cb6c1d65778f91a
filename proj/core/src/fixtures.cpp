#include "fcforge/fixtures.h"

#include "fcforge/digest.h"
#include "fcforge/error.h"
#include "fcforge/jsonl.h"
#include "fcforge/sampler.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iterator>

namespace fcforge::fixtures {

namespace {

using Enum = std::vector<std::string>;

struct ParamDef {
    const char * name;
    value_type type;
    const char * description;
    Enum enum_values;
    bool required;
};

struct ToolDef {
    const char * name;
    const char * domain;
    const char * english;
    const char * arabic;
    const char * request;  // dialect-neutral request phrase used in queries
    std::vector<ParamDef> params;
};

const char * const usage_note =
    "Use this tool only when the user explicitly asks for this kind of action or information; do not call it "
    "for greetings, opinions, small talk or general knowledge questions. Arguments must follow the declared types "
    "exactly, and optional fields may be omitted or left null when the user does not specify them.";

const Enum units{"celsius", "fahrenheit"};
const Enum weekdays{"saturday", "sunday", "monday", "tuesday", "wednesday", "thursday", "friday"};
const Enum languages{"ar", "en", "fr"};

const std::vector<ToolDef> & core_defs() {
    using vt = value_type;
    static const std::vector<ToolDef> defs = {
        {"get_weather", "weather", "Get the current weather conditions for a city.", "الحصول على حالة الطقس الحالية لمدينة.",
         "كيف الطقس في", {{"city", vt::string, "City name in Arabic or English.", {}, true},
                          {"unit", vt::string, "Temperature unit.", units, false},
                          {"days", vt::integer, "Number of past days to include.", {}, false}}},
        {"get_forecast", "weather", "Get a multi-day weather forecast.", "توقعات الطقس لعدة أيام.",
         "توقعات الطقس في", {{"city", vt::string, "City name.", {}, true},
                             {"days", vt::integer, "Forecast horizon in days.", {}, true},
                             {"unit", vt::string, "Temperature unit.", units, false}}},
        {"get_air_quality", "weather", "Report the air quality index for a city.", "مؤشر جودة الهواء في مدينة.",
         "جودة الهواء في", {{"city", vt::string, "City name.", {}, true},
                            {"pollutant", vt::string, "Pollutant to report.", {"pm25", "pm10", "o3", "no2"}, false}}},
        {"search_flights", "travel", "Search for flights between two cities.", "البحث عن رحلات طيران بين مدينتين.",
         "رحلة طيران من", {{"origin", vt::string, "Departure city or airport.", {}, true},
                           {"destination", vt::string, "Arrival city or airport.", {}, true},
                           {"date", vt::string, "Departure date, YYYY-MM-DD.", {}, true},
                           {"cabin", vt::string, "Cabin class.", {"economy", "business", "first"}, false},
                           {"passengers", vt::integer, "Number of passengers.", {}, false}}},
        {"book_hotel", "travel", "Book a hotel room.", "حجز غرفة في فندق.",
         "احجز فندق في", {{"city", vt::string, "City of the hotel.", {}, true},
                          {"check_in", vt::string, "Check-in date, YYYY-MM-DD.", {}, true},
                          {"nights", vt::integer, "Number of nights.", {}, true},
                          {"room_type", vt::string, "Room type.", {"single", "double", "suite"}, false}}},
        {"get_directions", "travel", "Get directions between two places.", "الحصول على الاتجاهات بين مكانين.",
         "كيف أروح إلى", {{"origin", vt::string, "Starting point.", {}, false},
                          {"destination", vt::string, "Destination.", {}, true},
                          {"mode", vt::string, "Travel mode.", {"driving", "walking", "transit"}, false}}},
        {"find_nearby", "travel", "Find nearby places of a given category.", "البحث عن أماكن قريبة من فئة معينة.",
         "أقرب مكان إلى", {{"category", vt::string, "Place category.",
                            {"restaurant", "pharmacy", "atm", "mosque", "hospital"}, true},
                           {"location", vt::string, "Reference location.", {}, true},
                           {"radius_km", vt::number, "Search radius in kilometres.", {}, false}}},
        {"convert_currency", "finance", "Convert an amount between currencies.", "تحويل مبلغ بين العملات.",
         "حوّل مبلغ", {{"amount", vt::number, "Amount to convert.", {}, true},
                       {"from", vt::string, "Source currency code.", {}, true},
                       {"to", vt::string, "Target currency code.", {}, true}}},
        {"get_stock_price", "finance", "Get the latest price of a stock.", "الحصول على آخر سعر لسهم.",
         "سعر سهم", {{"symbol", vt::string, "Ticker symbol.", {}, true},
                     {"exchange", vt::string, "Exchange.", {"tadawul", "adx", "egx", "nasdaq"}, false}}},
        {"transfer_money", "finance", "Transfer money to a saved recipient.", "تحويل أموال إلى مستفيد محفوظ.",
         "حوّل فلوس إلى", {{"recipient", vt::string, "Saved recipient name.", {}, true},
                           {"amount", vt::number, "Amount to send.", {}, true},
                           {"currency", vt::string, "Currency.", {"SAR", "AED", "EGP", "USD"}, false},
                           {"note", vt::string, "Transfer note.", {}, false}}},
        {"check_balance", "finance", "Check the balance of an account.", "الاستعلام عن رصيد الحساب.",
         "كم رصيدي في", {{"account_type", vt::string, "Account type.", {"checking", "savings"}, false}}},
        {"order_food", "food", "Order food from a restaurant.", "طلب طعام من مطعم.",
         "اطلب أكل من", {{"restaurant", vt::string, "Restaurant name.", {}, true},
                         {"items", vt::array, "Items to order.", {}, true},
                         {"delivery", vt::boolean, "Deliver instead of pickup.", {}, false}}},
        {"find_recipe", "food", "Find a recipe for a dish.", "البحث عن وصفة طبق.",
         "وصفة", {{"dish", vt::string, "Dish name.", {}, true},
                  {"diet", vt::string, "Dietary filter.", {"vegetarian", "halal", "vegan"}, false},
                  {"max_minutes", vt::integer, "Maximum preparation time.", {}, false}}},
        {"book_appointment", "health", "Book a medical appointment.", "حجز موعد طبي.",
         "احجز موعد عند", {{"specialty", vt::string, "Medical specialty.", {}, true},
                           {"date", vt::string, "Preferred date, YYYY-MM-DD.", {}, true},
                           {"clinic", vt::string, "Clinic name.", {}, false},
                           {"preferences", vt::object, "Extra preferences.", {}, false}}},
        {"get_pharmacy_hours", "health", "Get the opening hours of a pharmacy.", "مواعيد عمل صيدلية.",
         "متى تفتح صيدلية", {{"pharmacy", vt::string, "Pharmacy name.", {}, true},
                             {"day", vt::string, "Day of week.", weekdays, false}}},
        {"get_prayer_times", "religion", "Get prayer times for a city.", "مواقيت الصلاة لمدينة.",
         "مواقيت الصلاة في", {{"city", vt::string, "City name.", {}, true},
                              {"method", vt::string, "Calculation method.", {"umm_al_qura", "egyptian", "mwl"}, false},
                              {"date", vt::string, "Date, YYYY-MM-DD.", {}, false}}},
        {"get_qibla_direction", "religion", "Compute the qibla bearing for coordinates.", "تحديد اتجاه القبلة.",
         "اتجاه القبلة من", {{"latitude", vt::number, "Latitude in degrees.", {}, true},
                             {"longitude", vt::number, "Longitude in degrees.", {}, true}}},
        {"get_time", "utilities", "Get the current time in a time zone.", "الوقت الحالي في منطقة زمنية.",
         "كم الساعة في", {{"timezone", vt::string, "IANA time zone.", {}, true},
                          {"format", vt::string, "Clock format.", {"12h", "24h"}, false}}},
        {"set_reminder", "utilities", "Create a reminder.", "إنشاء تذكير.",
         "ذكرني", {{"text", vt::string, "Reminder text.", {}, true},
                   {"time", vt::string, "When to remind, ISO-8601.", {}, true},
                   {"repeat", vt::string, "Repetition.", {"none", "daily", "weekly"}, false}}},
        {"set_alarm", "utilities", "Set an alarm.", "ضبط منبه.",
         "اضبط منبه الساعة", {{"time", vt::string, "Alarm time, HH:MM.", {}, true},
                              {"label", vt::string, "Alarm label.", {}, false}}},
        {"pay_bill", "utilities", "Pay a utility bill.", "دفع فاتورة خدمات.",
         "ادفع فاتورة", {{"provider", vt::string, "Provider name.", {}, true},
                         {"amount", vt::number, "Amount to pay.", {}, true},
                         {"bill_type", vt::string, "Bill type.", {"electricity", "water", "internet", "mobile"}, false}}},
        {"get_news", "entertainment", "Get the latest news headlines.", "آخر عناوين الأخبار.",
         "آخر أخبار", {{"topic", vt::string, "News topic.", {"politics", "sports", "technology", "economy", "culture"}, false},
                       {"country", vt::string, "Country.", {}, false},
                       {"limit", vt::integer, "Number of headlines.", {}, false}}},
        {"play_music", "entertainment", "Play music.", "تشغيل موسيقى.",
         "شغّل أغنية", {{"query", vt::string, "Song, artist or playlist.", {}, true},
                        {"shuffle", vt::boolean, "Shuffle playback.", {}, false}}},
        {"get_movie_showtimes", "entertainment", "Get cinema showtimes.", "مواعيد عرض الأفلام.",
         "مواعيد السينما في", {{"city", vt::string, "City.", {}, true},
                               {"movie", vt::string, "Movie title.", {}, false},
                               {"language", vt::string, "Audio language.", {"arabic", "english"}, false}}},
        {"track_order", "shopping", "Track an online order.", "تتبع طلب عبر الإنترنت.",
         "وين طلبي رقم", {{"order_id", vt::string, "Order identifier.", {}, true}}},
        {"search_products", "shopping", "Search products in the store.", "البحث عن منتجات في المتجر.",
         "أبحث عن", {{"query", vt::string, "Search text.", {}, true},
                     {"max_price", vt::number, "Maximum price.", {}, false},
                     {"filters", vt::object, "Attribute filters.", {}, false}}},
        {"translate_text", "translation", "Translate text between languages.", "ترجمة نص بين اللغات.",
         "ترجم", {{"text", vt::string, "Text to translate.", {}, true},
                  {"target_language", vt::string, "Target language.", languages, true},
                  {"source_language", vt::string, "Source language.", {"ar", "en", "fr", "auto"}, false}}},
    };
    return defs;
}

const std::vector<ToolDef> & noisy_defs() {
    using vt = value_type;
    static const std::vector<ToolDef> defs = {
        {"test_tool", "utilities", "Internal test hook.", "أداة اختبار داخلية.", "اختبار",
         {{"payload", vt::string, "Anything.", {}, true}}},
        {"tmp_weather_v0", "weather", "Deprecated weather endpoint.", "واجهة طقس قديمة.", "الطقس القديم في",
         {{"location", vt::string, "Location.", {}, true}, {"metric", vt::boolean, "Metric units.", {}, false}}},
        {"debug_echo", "utilities", "Echo the input back.", "إعادة المدخلات.", "كرر",
         {{"message", vt::string, "Message.", {}, true}}},
        {"legacy_search", "shopping", "Old product search.", "بحث قديم عن المنتجات.", "بحث قديم عن",
         {{"q", vt::string, "Query.", {}, true}, {"page", vt::integer, "Page.", {}, false}}},
        {"placeholder_api", "utilities", "Placeholder.", "عنصر نائب.", "نائب",
         {{"value", vt::string, "Value.", {}, false}}},
        {"old_booking", "travel", "Superseded booking flow.", "مسار حجز قديم.", "حجز قديم",
         {{"ref", vt::string, "Reference.", {}, true}, {"kind", vt::string, "Kind.", {"hotel", "flight"}, false}}},
        {"unused_lookup", "finance", "Unused lookup.", "بحث غير مستخدم.", "استعلام",
         {{"key", vt::string, "Key.", {}, true}}},
    };
    return defs;
}

// alias -> canonical tool
const std::vector<std::pair<const char *, const char *>> aliases = {
    {"currency_convert", "convert_currency"},
    {"get_current_time", "get_time"},
};

ToolSchema build_tool(const ToolDef & d) {
    ToolSchema t;
    t.name = d.name;
    t.description = std::string(d.english) + " " + d.arabic + " " + usage_note;
    for (const auto & p : d.params) {
        ParameterSpec spec;
        spec.name = p.name;
        spec.type = p.type;
        spec.description = p.description;
        if (!p.enum_values.empty()) {
            spec.enum_values = p.enum_values;
        }
        spec.required = p.required;
        t.parameters.push_back(std::move(spec));
    }
    return t;
}

const ToolDef & def_of(std::string_view name) {
    for (const auto * table : {&core_defs(), &noisy_defs()}) {
        for (const auto & d : *table) {
            if (name == d.name) {
                return d;
            }
        }
    }
    for (const auto & [alias, canonical] : aliases) {
        if (name == alias) {
            return def_of(canonical);
        }
    }
    throw_config("fixtures: unknown tool '" + std::string(name) + "'");
}

std::uint64_t below(std::mt19937_64 & rng, std::uint64_t n) {
    return uniform_below(rng, n);
}

template <typename T> const T & pick(std::mt19937_64 & rng, const std::vector<T> & v) {
    return v[below(rng, v.size())];
}

bool coin(std::mt19937_64 & rng, double p) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53 < p;
}

const std::vector<std::string> cities{"الرياض", "جدة", "القاهرة", "دبي", "عمّان", "بيروت", "الدار البيضاء",
                                      "تونس", "الدوحة", "مسقط", "Riyadh", "Cairo"};
const std::vector<std::string> words{"موعد", "طلب", "رقم ١٢", "شاورما", "كبسة", "فطور", "اجتماع العمل",
                                     "أم كلثوم", "فيروز", "AAPL", "2222.SR", "الأهلي"};

// Realistic value for corpus rows (no tricky characters).
json plain_value(std::mt19937_64 & rng, const ParameterSpec & p) {
    if (p.enum_values) {
        return pick(rng, *p.enum_values);
    }
    switch (p.type) {
        case value_type::string: {
            if (p.name.find("date") != std::string::npos || p.name == "check_in") {
                char buf[16];
                std::snprintf(buf, sizeof buf, "2025-%02d-%02d", static_cast<int>(1 + below(rng, 12)),
                              static_cast<int>(1 + below(rng, 28)));
                return buf;
            }
            if (p.name == "time") {
                char buf[8];
                std::snprintf(buf, sizeof buf, "%02d:%02d", static_cast<int>(below(rng, 24)),
                              static_cast<int>(below(rng, 4) * 15));
                return buf;
            }
            if (p.name == "timezone") {
                return pick(rng, std::vector<std::string>{"Asia/Riyadh", "Africa/Cairo", "Asia/Dubai", "Africa/Casablanca"});
            }
            if (p.name == "from" || p.name == "to") {
                return pick(rng, std::vector<std::string>{"SAR", "AED", "EGP", "USD", "MAD"});
            }
            const bool place = p.name == "city" || p.name == "origin" || p.name == "destination" || p.name == "location";
            return place ? pick(rng, cities) : pick(rng, words);
        }
        case value_type::integer: return static_cast<std::int64_t>(1 + below(rng, 14));
        case value_type::number:  return static_cast<double>(below(rng, 100000)) / 4.0;
        case value_type::boolean: return coin(rng, 0.5);
        case value_type::array:   return json::array({pick(rng, words), pick(rng, words)});
        case value_type::object:  return json{{"note", pick(rng, words)}};
    }
    return nullptr;
}

struct DialectVoice {
    Dialect dialect;
    const char * opener;
    const char * chit_chat;
};

const std::vector<DialectVoice> voices = {
    {Dialect::msa, "من فضلك،", "ما رأيك في الشعر العربي القديم؟"},
    {Dialect::egyptian, "لو سمحت عايز أعرف", "إزيك عامل إيه النهارده؟"},
    {Dialect::gulf, "ابغى أعرف", "شلونك؟ عساك بخير"},
    {Dialect::levantine, "بدي أعرف", "كيفك؟ شو الأخبار؟"},
    {Dialect::maghrebi, "بغيت نعرف", "لاباس عليك؟ كيداير؟"},
};

std::string timestamp(std::mt19937_64 & rng) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "2025-%02d-%02dT%02d:%02d:00+03:00", static_cast<int>(1 + below(rng, 12)),
                  static_cast<int>(1 + below(rng, 28)), static_cast<int>(below(rng, 24)),
                  static_cast<int>(below(rng, 60)));
    return buf;
}

std::string query_for(const DialectVoice & voice, const ToolDef & def, const Arguments & args) {
    std::string q = std::string(voice.opener) + " " + def.request;
    for (const auto & [k, v] : args) {
        if (v.is_string()) {
            q += " " + v.get<std::string>();
            break;
        }
    }
    return q + "؟";
}

enum class row_kind { regular, negative, silent_negative, null_enum, variant_enum, alias, noisy, empty_query };

struct Row {
    json value;
    bool empty_query = false;
};

std::vector<Row> generate_rows(const CorpusOptions & o) {
    const auto negatives = static_cast<std::size_t>(static_cast<double>(o.rows) * o.negative_share + 0.5);
    const std::size_t special = o.null_enum_rows + o.variant_enum_rows + o.alias_rows + o.noisy_rows + o.empty_queries;
    if (o.silent_negatives > negatives) {
        throw_config("fixtures: more silent negatives than negatives");
    }
    if (special + negatives > o.rows) {
        throw_config("fixtures: special rows exceed the corpus size");
    }
    std::vector<row_kind> kinds;
    kinds.insert(kinds.end(), o.null_enum_rows, row_kind::null_enum);
    kinds.insert(kinds.end(), o.variant_enum_rows, row_kind::variant_enum);
    kinds.insert(kinds.end(), o.alias_rows, row_kind::alias);
    kinds.insert(kinds.end(), o.noisy_rows, row_kind::noisy);
    kinds.insert(kinds.end(), o.empty_queries, row_kind::empty_query);
    kinds.insert(kinds.end(), o.silent_negatives, row_kind::silent_negative);
    kinds.insert(kinds.end(), negatives - o.silent_negatives, row_kind::negative);
    kinds.resize(o.rows, row_kind::regular);

    std::mt19937_64 rng(mix64(o.seed ^ 0x5eedf1c5ULL));
    for (std::size_t i = kinds.size(); i > 1; --i) {
        std::swap(kinds[i - 1], kinds[below(rng, i)]);
    }

    const auto core = core_inventory();
    std::vector<const ToolSchema *> with_optional_enum;
    for (const auto & t : core) {
        for (const auto & p : t.parameters) {
            if (p.enum_values && !p.required) {
                with_optional_enum.push_back(&t);
                break;
            }
        }
    }
    static const std::vector<std::pair<std::string, std::string>> variant_targets = {
        {"get_weather", "unit"}, {"get_forecast", "unit"}, {"translate_text", "target_language"}};
    const auto norm = normalization_map();
    const auto raw = raw_inventory();

    std::vector<Row> rows;
    rows.reserve(kinds.size());
    for (std::size_t i = 0; i < kinds.size(); ++i) {
        char id[32];
        std::snprintf(id, sizeof id, "s%06zu", i);
        const auto & voice = voices[below(rng, voices.size())];
        Sample s;
        s.id = id;
        s.dialect = voice.dialect;
        s.timestamp = timestamp(rng);
        const row_kind kind = kinds[i];

        if (kind == row_kind::negative || kind == row_kind::silent_negative) {
            s.requires_function = false;
            s.query = voice.chit_chat;
            s.domain = core_defs()[below(rng, core_defs().size())].domain;
            if (kind == row_kind::negative) {
                s.response = "أهلاً! يسعدني الحديث معك.";
            }
        } else {
            const ToolSchema * tool = nullptr;
            std::string forced_param;
            if (kind == row_kind::null_enum) {
                tool = with_optional_enum[below(rng, with_optional_enum.size())];
            } else if (kind == row_kind::variant_enum) {
                const auto & [name, param] = variant_targets[below(rng, variant_targets.size())];
                tool = find_tool(core, name);
                forced_param = param;
            } else if (kind == row_kind::alias) {
                tool = find_tool(raw, aliases[below(rng, aliases.size())].first);
            } else if (kind == row_kind::noisy) {
                tool = find_tool(raw, noisy_defs()[below(rng, noisy_defs().size())].name);
            } else {
                tool = &core[below(rng, core.size())];
            }
            const ToolDef & def = def_of(tool->name);
            ToolCall call;
            call.tool_name = tool->name;
            bool nulled = false;
            for (const auto & p : tool->parameters) {
                if (kind == row_kind::null_enum && !nulled && p.enum_values && !p.required) {
                    call.arguments[p.name] = nullptr;
                    nulled = true;
                } else if (p.name == forced_param) {
                    const auto & variants = norm.entries.at(tool->name).at(p.name);
                    auto it = variants.begin();
                    std::advance(it, static_cast<long>(below(rng, variants.size())));
                    call.arguments[p.name] = it->first;
                } else if (p.required || coin(rng, 0.5)) {
                    call.arguments[p.name] = plain_value(rng, p);
                }
            }
            s.requires_function = true;
            s.domain = def.domain;
            s.query = query_for(voice, def, call.arguments);
            s.target = std::move(call);
        }
        if (o.reasoning_share > 0 && coin(rng, o.reasoning_share)) {
            s.reasoning = s.requires_function
                              ? "The user asks for " + s.target->tool_name + "; the offered tools include it."
                              : std::string("The request is conversational and needs no tool.");
        }
        if (kind == row_kind::empty_query) {
            s.query = "x";
        }
        Row row{json(to_json(s)), kind == row_kind::empty_query};
        if (row.empty_query) {
            row.value["query"] = "";
        }
        rows.push_back(std::move(row));
    }
    return rows;
}

const char * const tricky_pieces[] = {
    "{", "}", "\"", "\\", ",", ":", "[", "]", "'", " ", "  ", "\n", "\t", "جدة", "مرحبا بالعالم", "١٢٣",
    "{\"a\":1}", "\\\"", "null", "true", "/", "<", ">", "é", "😀", "ﻻ", "%s", "\\u0041", "<escape",
};

std::string tricky_string(std::mt19937_64 & rng, const ControlTokens & tokens) {
    std::string s;
    const auto parts = below(rng, 7);
    for (std::uint64_t i = 0; i < parts; ++i) {
        if (below(rng, 12) == 0) {
            s += tokens.escape;
        } else {
            s += tricky_pieces[below(rng, std::size(tricky_pieces))];
        }
    }
    return s;
}

json tricky_value(std::mt19937_64 & rng, value_type type, const ControlTokens & tokens, int depth) {
    switch (type) {
        case value_type::string: return tricky_string(rng, tokens);
        case value_type::integer: {
            const auto r = static_cast<std::int64_t>(rng());
            return below(rng, 3) == 0 ? r : r % 1000;
        }
        case value_type::number: {
            switch (below(rng, 3)) {
                case 0: return static_cast<double>(static_cast<std::int64_t>(rng() % 2000001) - 1000000) / 7.0;
                case 1: return static_cast<std::int64_t>(rng() % 1000);
                default: return std::ldexp(static_cast<double>(rng() >> 11), -static_cast<int>(below(rng, 80)));
            }
        }
        case value_type::boolean: return coin(rng, 0.5);
        case value_type::array: {
            json a = json::array();
            const auto n = below(rng, depth > 2 ? 2 : 4);
            for (std::uint64_t i = 0; i < n; ++i) {
                static const value_type inner[] = {value_type::string, value_type::integer, value_type::number,
                                                   value_type::boolean, value_type::array, value_type::object};
                const auto t = inner[below(rng, depth > 2 ? 4 : 6)];
                a.push_back(tricky_value(rng, t, tokens, depth + 1));
            }
            if (below(rng, 8) == 0) {
                a.push_back(nullptr);
            }
            return a;
        }
        case value_type::object: {
            json o = json::object();
            const auto n = below(rng, depth > 2 ? 2 : 4);
            for (std::uint64_t i = 0; i < n; ++i) {
                static const value_type inner[] = {value_type::string, value_type::integer, value_type::boolean,
                                                   value_type::array, value_type::object};
                o[tricky_string(rng, tokens)] = tricky_value(rng, inner[below(rng, depth > 2 ? 3 : 5)], tokens, depth + 1);
            }
            return o;
        }
    }
    return nullptr;
}

} // namespace

std::vector<ToolSchema> core_inventory() {
    std::vector<ToolSchema> out;
    for (const auto & d : core_defs()) {
        out.push_back(build_tool(d));
    }
    return out;
}

std::vector<ToolSchema> raw_inventory() {
    auto out = core_inventory();
    for (const auto & d : noisy_defs()) {
        out.push_back(build_tool(d));
    }
    for (const auto & [alias, canonical] : aliases) {
        ToolSchema t = *find_tool(out, canonical);
        t.name = alias;
        out.push_back(std::move(t));
    }
    return out;
}

PrunePlan prune_plan() {
    PrunePlan plan;
    for (const auto & d : noisy_defs()) {
        plan.remove.insert(d.name);
    }
    for (const auto & [alias, canonical] : aliases) {
        plan.merge[alias] = MergeRule{canonical, {}};
    }
    return plan;
}

NormalizationMap normalization_map() {
    NormalizationMap map;
    const std::map<std::string, std::string> unit_variants = {
        {"سيلزيوس", "celsius"}, {"مئوية", "celsius"}, {"Celsius", "celsius"}, {"فهرنهايت", "fahrenheit"}};
    map.entries["get_weather"]["unit"] = unit_variants;
    map.entries["get_forecast"]["unit"] = unit_variants;
    map.entries["translate_text"]["target_language"] = {
        {"العربية", "ar"}, {"الإنجليزية", "en"}, {"English", "en"}, {"الفرنسية", "fr"}};
    return map;
}

std::string corpus_jsonl(const CorpusOptions & options) {
    std::string out;
    for (const auto & row : generate_rows(options)) {
        out += dump_compact(row.value);
        out += '\n';
    }
    return out;
}

std::vector<Sample> corpus_samples(const CorpusOptions & options) {
    std::vector<Sample> out;
    for (const auto & row : generate_rows(options)) {
        if (!row.empty_query) {
            out.push_back(sample_from_json(row.value));
        }
    }
    return out;
}

Sample random_positive(std::mt19937_64 & rng, const ToolSchema & tool, const std::string & id,
                       const ControlTokens & tokens) {
    Sample s;
    s.id = id;
    s.dialect = all_dialects[below(rng, std::size(all_dialects))];
    s.domain = "synthetic";
    s.requires_function = true;
    s.query = "طلب اختبار " + id;
    s.timestamp = timestamp(rng);
    ToolCall call;
    call.tool_name = tool.name;
    for (const auto & p : tool.parameters) {
        if (!p.required && coin(rng, 0.3)) {
            continue;
        }
        if (p.enum_values) {
            call.arguments[p.name] = pick(rng, *p.enum_values);
        } else {
            call.arguments[p.name] = tricky_value(rng, p.type, tokens, 0);
        }
    }
    s.target = std::move(call);
    return s;
}

std::string make_prediction(const Sample & sample, const std::vector<ToolSchema> & offered,
                            std::span<const ToolSchema> inventory, error_class klass, bool think,
                            const SerializerConfig & config) {
    const auto & tk = config.tokens;
    const auto call_text = [&](const std::string & name, const Arguments & args) {
        return tk.call_start + name + render_arguments(args, find_tool(inventory, name), tk) + tk.call_end +
               tk.turn_end;
    };
    const auto no_call = config.no_call_text + tk.turn_end;
    std::string body;
    const bool positive = sample.requires_function;
    if (!positive && (klass == error_class::wrong_function || klass == error_class::argument_mismatch ||
                      klass == error_class::missed_call)) {
        throw_config(std::string("fixtures: ") + to_string(klass) + " needs a positive sample");
    }
    switch (klass) {
        case error_class::parse_failure:
            body = tk.call_start + (offered.empty() ? std::string("tool") : offered.front().name) + "{\"broken\":";
            break;
        case error_class::correct:
            body = positive ? call_text(sample.target->tool_name, sample.target->arguments) : no_call;
            break;
        case error_class::missed_call:
            body = no_call;
            break;
        case error_class::tool_hallucination: {
            if (!positive) {
                body = call_text(offered.empty() ? inventory.front().name : offered.front().name, {});
                break;
            }
            std::string name = "nonexistent_tool";
            for (const auto & t : inventory) {
                const bool is_offered = std::any_of(offered.begin(), offered.end(),
                                                    [&](const ToolSchema & o) { return o.name == t.name; });
                if (!is_offered) {
                    name = t.name;
                    break;
                }
            }
            body = call_text(name, sample.target->arguments);
            break;
        }
        case error_class::wrong_function: {
            const auto it = std::find_if(offered.begin(), offered.end(),
                                         [&](const ToolSchema & o) { return o.name != sample.target->tool_name; });
            if (it == offered.end()) {
                throw_config("fixtures: WrongFunction needs a second offered tool");
            }
            body = call_text(it->name, sample.target->arguments);
            break;
        }
        case error_class::argument_mismatch: {
            Arguments args = sample.target->arguments;
            if (args.empty()) {
                args["unexpected"] = "x";
            } else {
                args.erase(args.begin());
            }
            body = call_text(sample.target->tool_name, args);
            break;
        }
    }
    if (think) {
        const std::string reasoning = positive ? "The request needs " + sample.target->tool_name + "."
                                               : std::string("No tool is needed.");
        body = config.think.open + reasoning + config.think.close + body;
    }
    return body;
}

} // namespace fcforge::fixtures
