#include "newsnet/ingest/porter.hpp"

#include <algorithm>

namespace newsnet::ingest {

namespace {

// Working state for one word. `k` is the index of the last character of the
// current stem, `j` is a general offset set by ends().
class Stemmer {
public:
    explicit Stemmer(std::string_view w) : b_(w), k_(static_cast<int>(w.size()) - 1) {}

    std::string run() {
        if (k_ <= 1) return b_;
        step1ab();
        if (k_ > 0) {
            step1c();
            step2();
            step3();
            step4();
            step5();
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
        return b_;
    }

private:
    bool cons(int i) const {
        switch (b_[i]) {
            case 'a': case 'e': case 'i': case 'o': case 'u': return false;
            case 'y': return i == 0 ? true : !cons(i - 1);
            default: return true;
        }
    }

    // Number of VC sequences in b[0..j].
    int m() const {
        int n = 0;
        int i = 0;
        while (true) {
            if (i > j_) return n;
            if (!cons(i)) break;
            ++i;
        }
        ++i;
        while (true) {
            while (true) {
                if (i > j_) return n;
                if (cons(i)) break;
                ++i;
            }
            ++i;
            ++n;
            while (true) {
                if (i > j_) return n;
                if (!cons(i)) break;
                ++i;
            }
            ++i;
        }
    }

    bool vowel_in_stem() const {
        for (int i = 0; i <= j_; ++i) {
            if (!cons(i)) return true;
        }
        return false;
    }

    bool double_consonant(int j) const {
        if (j < 1) return false;
        if (b_[j] != b_[j - 1]) return false;
        return cons(j);
    }

    // consonant-vowel-consonant ending at i, where the final consonant is not w, x or y
    bool cvc(int i) const {
        if (i < 2 || !cons(i) || cons(i - 1) || !cons(i - 2)) return false;
        const char ch = b_[i];
        return !(ch == 'w' || ch == 'x' || ch == 'y');
    }

    bool ends(std::string_view s) {
        const int len = static_cast<int>(s.size());
        if (s.back() != b_[k_]) return false;
        if (len > k_ + 1) return false;
        if (std::string_view(b_).substr(static_cast<std::size_t>(k_ - len + 1), s.size()) != s) return false;
        j_ = k_ - len;
        return true;
    }

    void set_to(std::string_view s) {
        b_.replace(static_cast<std::size_t>(j_ + 1), std::string::npos, s);
        k_ = j_ + static_cast<int>(s.size());
    }

    void replace_if_measure(std::string_view s) {
        if (m() > 0) set_to(s);
    }

    void step1ab() {
        if (b_[k_] == 's') {
            if (ends("sses")) {
                k_ -= 2;
            } else if (ends("ies")) {
                set_to("i");
            } else if (b_[k_ - 1] != 's') {
                --k_;
            }
        }
        if (ends("eed")) {
            if (m() > 0) --k_;
        } else if ((ends("ed") || ends("ing")) && vowel_in_stem()) {
            k_ = j_;
            if (ends("at")) {
                set_to("ate");
            } else if (ends("bl")) {
                set_to("ble");
            } else if (ends("iz")) {
                set_to("ize");
            } else if (double_consonant(k_)) {
                --k_;
                const char ch = b_[k_];
                if (ch == 'l' || ch == 's' || ch == 'z') ++k_;
            } else if (j_ = k_, m() == 1 && cvc(k_)) {
                set_to("e");
            }
        }
        b_.resize(static_cast<std::size_t>(k_ + 1));
    }

    void step1c() {
        if (ends("y") && vowel_in_stem()) b_[k_] = 'i';
    }

    bool rule(std::string_view suffix, std::string_view replacement) {
        if (!ends(suffix)) return false;
        replace_if_measure(replacement);
        return true;
    }

    void step2() {
        switch (b_[k_ - 1]) {
            case 'a':
                rule("ational", "ate") || rule("tional", "tion");
                break;
            case 'c':
                rule("enci", "ence") || rule("anci", "ance");
                break;
            case 'e':
                rule("izer", "ize");
                break;
            case 'l':
                rule("bli", "ble") || rule("alli", "al") || rule("entli", "ent") || rule("eli", "e") ||
                    rule("ousli", "ous");
                break;
            case 'o':
                rule("ization", "ize") || rule("ation", "ate") || rule("ator", "ate");
                break;
            case 's':
                rule("alism", "al") || rule("iveness", "ive") || rule("fulness", "ful") || rule("ousness", "ous");
                break;
            case 't':
                rule("aliti", "al") || rule("iviti", "ive") || rule("biliti", "ble");
                break;
            case 'g':
                rule("logi", "log");
                break;
            default:
                break;
        }
    }

    void step3() {
        switch (b_[k_]) {
            case 'e':
                rule("icate", "ic") || rule("ative", "") || rule("alize", "al");
                break;
            case 'i':
                rule("iciti", "ic");
                break;
            case 'l':
                rule("ical", "ic") || rule("ful", "");
                break;
            case 's':
                rule("ness", "");
                break;
            default:
                break;
        }
    }

    void step4() {
        auto any = [this](std::initializer_list<std::string_view> suffixes) {
            return std::any_of(suffixes.begin(), suffixes.end(), [this](std::string_view s) { return ends(s); });
        };
        bool matched = false;
        switch (b_[k_ - 1]) {
            case 'a': matched = any({"al"}); break;
            case 'c': matched = any({"ance", "ence"}); break;
            case 'e': matched = any({"er"}); break;
            case 'i': matched = any({"ic"}); break;
            case 'l': matched = any({"able", "ible"}); break;
            case 'n': matched = any({"ant", "ement", "ment", "ent"}); break;
            case 'o':
                if (ends("ion") && j_ >= 0 && (b_[j_] == 's' || b_[j_] == 't')) {
                    matched = true;
                } else {
                    matched = ends("ou");
                }
                break;
            case 's': matched = any({"ism"}); break;
            case 't': matched = any({"ate", "iti"}); break;
            case 'u': matched = any({"ous"}); break;
            case 'v': matched = any({"ive"}); break;
            case 'z': matched = any({"ize"}); break;
            default: break;
        }
        if (matched && m() > 1) k_ = j_;
    }

    void step5() {
        j_ = k_;
        if (b_[k_] == 'e') {
            const int a = m();
            if (a > 1 || (a == 1 && !cvc(k_ - 1))) --k_;
        }
        // m() still measures up to the pre-step k
        if (b_[k_] == 'l' && double_consonant(k_) && m() > 1) --k_;
    }

    std::string b_;
    int k_;
    int j_ = 0;
};

}  // namespace

std::string porter_stem(std::string_view word) {
    if (word.empty()) return {};
    if (!std::all_of(word.begin(), word.end(), [](char c) { return c >= 'a' && c <= 'z'; })) {
        return std::string(word);
    }
    return Stemmer(word).run();
}

}  // namespace newsnet::ingest
