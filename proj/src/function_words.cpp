#include <algorithm>

#include "cxg/models.hpp"

namespace cxg {

const std::vector<std::string>& function_words() {
  static const std::vector<std::string> words = [] {
    std::vector<std::string> w = {
        "a", "about", "above", "across", "after", "afterwards", "again", "against", "ago",
        "albeit", "all", "almost", "alone", "along", "already", "also", "although", "always",
        "am", "amid", "among", "amongst", "an", "and", "another", "any", "anybody", "anyhow",
        "anyone", "anything", "anyway", "anywhere", "are", "around", "as", "at", "away", "back",
        "be", "became", "because", "become", "been", "before", "beforehand", "behind", "being",
        "below", "beneath", "beside", "besides", "between", "beyond", "both", "but", "by", "can",
        "cannot", "could", "did", "do", "does", "doing", "done", "down", "during", "each",
        "either", "else", "elsewhere", "enough", "even", "ever", "every", "everybody",
        "everyone", "everything", "everywhere", "except", "few", "fewer", "for", "former",
        "formerly", "from", "further", "had", "has", "have", "having", "he", "hence", "her",
        "here", "hereby", "herein", "hers", "herself", "him", "himself", "his", "how",
        "however", "i", "if", "in", "indeed", "inside", "instead", "into", "is", "it", "its",
        "itself", "just", "last", "latter", "least", "less", "lest", "like", "many", "may",
        "me", "meanwhile", "might", "mine", "more", "moreover", "most", "mostly", "much",
        "must", "my", "myself", "near", "neither", "never", "nevertheless", "next", "no",
        "nobody", "none", "noone", "nor", "not", "nothing", "now", "nowhere", "of", "off",
        "often", "on", "once", "one", "only", "onto", "or", "other", "others", "otherwise",
        "ought", "our", "ours", "ourselves", "out", "outside", "over", "own", "past", "per",
        "perhaps", "plus", "quite", "rather", "round", "same", "several", "shall", "she",
        "should", "since", "so", "some", "somebody", "somehow", "someone", "something",
        "sometime", "sometimes", "somewhat", "somewhere", "soon", "still", "such", "than",
        "that", "the", "their", "theirs", "them", "themselves", "then", "thence", "there",
        "thereafter", "thereby", "therefore", "therein", "these", "they", "this", "those",
        "though", "through", "throughout", "thru", "thus", "till", "to", "together", "too",
        "toward", "towards", "under", "underneath", "unless", "unlike", "until", "up", "upon",
        "us", "very", "via", "was", "we", "well", "were", "what", "whatever", "when", "whence",
        "whenever", "where", "whereas", "whereby", "wherein", "whereupon", "wherever",
        "whether", "which", "whichever", "while", "whilst", "whither", "who", "whoever",
        "whole", "whom", "whomever", "whose", "why", "will", "with", "within", "without",
        "would", "yet", "you", "your", "yours", "yourself", "yourselves", "ain't", "aren't",
        "can't", "couldn't", "didn't", "doesn't", "don't", "hadn't", "hasn't", "haven't",
        "isn't", "mustn't", "shan't", "shouldn't", "wasn't", "weren't", "won't", "wouldn't",
        "gonna", "gotta", "wanna", "amongst", "shouldst", "thee", "thou", "thy", "ye", "y'all",
        "'s", "'ll", "'re", "'ve", "'d", "'m", "n't"};
    std::sort(w.begin(), w.end());
    w.erase(std::unique(w.begin(), w.end()), w.end());
    return w;
  }();
  return words;
}

}  // namespace cxg
