#include "stemmer.hpp"

#include <array>

namespace ocean {

namespace {

// Working buffer: word characters in w[0..k), all lowercase.
struct Stem {
    std::string w;
    std::size_t k; // current end

    explicit Stem(std::string_view word) : w(word), k(word.size()) {}

    bool cons(std::size_t i) const {
        char c = w[i];
        switch (c) {
            case 'a': case 'e': case 'i': case 'o': case 'u':
                return false;
            case 'y':
                return i == 0 ? true : !cons(i - 1);
            default:
                return true;
        }
    }

    // Number of VC sequences in w[0..j).
    std::size_t measure(std::size_t j) const {
        std::size_t m = 0;
        std::size_t i = 0;
        while (i < j && cons(i)) ++i;       // leading consonants
        while (i < j) {
            while (i < j && !cons(i)) ++i;  // vowel run
            if (i >= j) break;
            ++m;
            while (i < j && cons(i)) ++i;   // consonant run
        }
        return m;
    }

    bool has_vowel(std::size_t j) const {
        for (std::size_t i = 0; i < j; ++i)
            if (!cons(i)) return true;
        return false;
    }

    bool double_cons(std::size_t j) const {
        return j >= 2 && w[j - 1] == w[j - 2] && cons(j - 1);
    }

    // consonant-vowel-consonant ending where the final consonant is not w, x, y.
    bool cvc(std::size_t j) const {
        if (j < 3 || !cons(j - 3) || cons(j - 2) || !cons(j - 1)) return false;
        char c = w[j - 1];
        return c != 'w' && c != 'x' && c != 'y';
    }

    bool ends(std::string_view s) const {
        if (s.size() > k) return false;
        return w.compare(k - s.size(), s.size(), s) == 0;
    }

    // Stem length when the given suffix is removed; only call after ends().
    std::size_t base(std::string_view s) const { return k - s.size(); }

    void set_suffix(std::string_view s1, std::string_view s2) {
        std::size_t b = base(s1);
        w.replace(b, k - b, s2);
        k = b + s2.size();
    }

    // Map s1 -> s2 when the remaining stem has measure > 0.
    bool map_m0(std::string_view s1, std::string_view s2) {
        if (!ends(s1)) return false;
        if (measure(base(s1)) > 0) set_suffix(s1, s2);
        return true;
    }

    void step1a() {
        if (ends("sses")) set_suffix("sses", "ss");
        else if (ends("ies")) set_suffix("ies", "i");
        else if (ends("ss")) { /* unchanged */ }
        else if (ends("s")) set_suffix("s", "");
    }

    void step1b() {
        if (ends("eed")) {
            if (measure(base("eed")) > 0) set_suffix("eed", "ee");
            return;
        }
        bool stripped = false;
        if (ends("ed") && has_vowel(base("ed"))) {
            set_suffix("ed", "");
            stripped = true;
        } else if (ends("ing") && has_vowel(base("ing"))) {
            set_suffix("ing", "");
            stripped = true;
        }
        if (!stripped) return;
        if (ends("at")) set_suffix("at", "ate");
        else if (ends("bl")) set_suffix("bl", "ble");
        else if (ends("iz")) set_suffix("iz", "ize");
        else if (double_cons(k)) {
            char c = w[k - 1];
            if (c != 'l' && c != 's' && c != 'z') --k;
        } else if (measure(k) == 1 && cvc(k)) {
            w.replace(k, w.size() - k, "e");
            k += 1;
        }
    }

    void step1c() {
        if (ends("y") && has_vowel(base("y"))) w[k - 1] = 'i';
    }

    void step2() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 20> rules{{
            {"ational", "ate"}, {"tional", "tion"}, {"enci", "ence"}, {"anci", "ance"},
            {"izer", "ize"},    {"abli", "able"},   {"alli", "al"},   {"entli", "ent"},
            {"eli", "e"},       {"ousli", "ous"},   {"ization", "ize"}, {"ation", "ate"},
            {"ator", "ate"},    {"alism", "al"},    {"iveness", "ive"}, {"fulness", "ful"},
            {"ousness", "ous"}, {"aliti", "al"},    {"iviti", "ive"},   {"biliti", "ble"},
        }};
        for (const auto& [s1, s2] : rules)
            if (map_m0(s1, s2)) return;
    }

    void step3() {
        static constexpr std::array<std::pair<std::string_view, std::string_view>, 7> rules{{
            {"icate", "ic"}, {"ative", ""}, {"alize", "al"}, {"iciti", "ic"},
            {"ical", "ic"},  {"ful", ""},   {"ness", ""},
        }};
        for (const auto& [s1, s2] : rules)
            if (map_m0(s1, s2)) return;
    }

    void step4() {
        static constexpr std::array<std::string_view, 19> suffixes{
            "al",  "ance", "ence", "er",    "ic",   "able", "ible", "ant", "ement", "ment",
            "ent", "ion",  "ou",   "ism",   "ate",  "iti",  "ous",  "ive", "ize",
        };
        for (std::string_view s : suffixes) {
            if (!ends(s)) continue;
            std::size_t b = base(s);
            if (s == "ion" && !(b >= 1 && (w[b - 1] == 's' || w[b - 1] == 't'))) return;
            if (measure(b) > 1) set_suffix(s, "");
            return;
        }
    }

    void step5a() {
        if (!ends("e")) return;
        std::size_t m = measure(k - 1);
        if (m > 1 || (m == 1 && !cvc(k - 1))) set_suffix("e", "");
    }

    void step5b() {
        if (measure(k) > 1 && double_cons(k) && w[k - 1] == 'l') --k;
    }

    std::string result() const { return w.substr(0, k); }
};

} // namespace

std::string porter_stem(std::string_view word) {
    if (word.size() < 3) return std::string(word);
    Stem s(word);
    s.step1a();
    s.step1b();
    s.step1c();
    s.step2();
    s.step3();
    s.step4();
    s.step5a();
    s.step5b();
    return s.result();
}

} // namespace ocean
