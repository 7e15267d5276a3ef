#include "multipun/prompts.h"

#include <cctype>

#include "multipun/error.h"
#include "multipun/text.h"

namespace multipun::prompts {

namespace {

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

// Length of the placeholder starting at s[i] == '{', or 0 if none.
std::size_t placeholder_at(std::string_view s, std::size_t i) {
  if (i + 2 >= s.size() || s[i] != '{' || !ident_start(s[i + 1])) return 0;
  std::size_t j = i + 1;
  while (j < s.size() && ident_char(s[j])) ++j;
  if (j >= s.size() || s[j] != '}') return 0;
  return j - i + 1;
}

}  // namespace

std::string render_prompt(std::string_view tmpl, const Fields& fields) {
  std::string out;
  out.reserve(tmpl.size() + 256);
  for (std::size_t i = 0; i < tmpl.size();) {
    std::size_t len = placeholder_at(tmpl, i);
    if (len == 0) {
      out.push_back(tmpl[i++]);
      continue;
    }
    std::string_view name = tmpl.substr(i + 1, len - 2);
    auto it = fields.find(name);
    if (it == fields.end()) throw TemplateError("unbound placeholder {" + std::string(name) + "}");
    out += it->second;
    i += len;
  }
  return out;
}

std::set<std::string> placeholders(std::string_view tmpl) {
  std::set<std::string> names;
  for (std::size_t i = 0; i < tmpl.size(); ++i) {
    if (std::size_t len = placeholder_at(tmpl, i)) {
      names.emplace(tmpl.substr(i + 1, len - 2));
      i += len - 1;
    }
  }
  return names;
}

// ---------------------------------------------------------------------------
// Sample construction

const std::string_view kCreativeHomophonic = R"(# Role

You are an expert in multimodal humor. Your task is to generate visual pun data based on **Homophones** (words that sound the same but have different meanings and spellings).

# Task Definition

I will provide you with two words:

1. **Word A (Visual Object):** The word that determines the visual appearance (S_p).
2. **Word B (Hidden Context):** The word that determines the behavior/action (S_a).

You need to generate:

1. **Image Description:** Description of Object A acting out the meaning of Word B.
2. **Caption:** A sentence containing Word A, but implying Word B.
3. **Interpretation:** An analysis of the pun.

# Example

**Input:**

* **Word A:** pear: sweet juicy gritty-textured fruit available in many varieties
* **Word B:** pair: two items of the same kind

**Output:**

**Image Description:** Two cartoon pears holding hands and smiling happily at each other.

**Caption:** We make a great pear.

**Interpretation:** Visual depicts two pears (literal object, S_p) holding hands like a romantic pair (figurative behavior, S_a). The caption exploits the homophonic relationship between 'pear' (w_p) and 'pair' (w_a), creating humor through sound similarity between different meanings.

# Current Input

* **Word A:** {wp}: {sp_def}
* **Word B:** {wa}: {sa_def}

# Output
)";

const std::string_view kCreativeHomographic = R"(# Role

You are an expert in multimodal humor. Your task is to generate visual pun data based on **Homographic Puns** (a single word with multiple meanings in the same spelling).

# Task Definition

I will provide you with one word and its two distinct definitions:

1. **The Word:** The lexical item used in the caption.
2. **Definition 1 (Visual Object):** The literal/concrete meaning that determines the physical appearance of the object (S_p).
3. **Definition 2 (Hidden Context):** The figurative behavior/state meaning that determines the behavior, action, or setting (S_a).

You need to generate:

1. **Image Description:** A description of the object from Definition 1 performing the action or situated in the context of Definition 2.
2. **Caption:** A witty sentence using "The Word", where the sentence structure strongly implies Definition 2.
3. **Interpretation:** A concise explanation of the pun mechanism.

# Example

**Input:**

* **The Word:** fan
* **Definition 1:** a device for creating a current of air by movement of a surface or surfaces
* **Definition 2:** an ardent follower and admirer

**Output:**

* **Image Description:** A large electric floor fan in a stadium seat, holding a foam finger and cheering loudly.
* **Caption:** I'm your biggest fan.
* **Interpretation:** Visual shows a cooling fan (literal object, S_p); caption uses 'fan' as admirer (figurative behavior, S_a), creating a homographic pun where the same word embodies both meanings.

# Current Input

* **The Word:** {word}
* **Definition 1 (Visual Object):** {sp_def}
* **Definition 2 (Hidden Context):** {sa_def}

# Output
)";

const std::string_view kExplicativeSubstitution = R"(You are a data augmentation expert. Given the following pun, generate an Explicative Substitution variant:

Original Caption: {caption}

Pun Word (w_p): {word}

Hidden Meaning (S_a): {meaning}

Task: Replace w_p with an EXPLICIT STATEMENT of the hidden meaning S_a.

Constraints:
- Do NOT use w_p or w_a directly
- Use paraphrases or synonyms to express S_a
- Adjust grammar if needed for naturalness
- Prefer single-word replacements when possible

Example:
Original: "We make a great pear."
Hidden Meaning: romantic couple
Output: "We make a great romantic couple."

Respond with the rewritten caption only.
)";

const std::string_view kRandomSubstitution = R"(You are a data augmentation expert. Given the following pun, generate a Random Substitution variant:

Original Image Prompt: {visual}

Original Caption: {caption}

Pun Word (w_p): {word}

Task:
1. Select a RANDOM concrete noun (e.g., chair, banana, bicycle, umbrella, book) that is SEMANTICALLY UNRELATED to the original pun context
2. Replace the main object in the image prompt with this random entity
3. Replace w_p in the caption with the same random entity
4. Keep the same action/context structure

Constraints:
- The random entity must be a concrete, visualizable noun
- Must be completely unrelated to original pun
- Do NOT reuse common examples (vary your selection)

Example:
Original Visual: "Two cartoon pears holding hands..."
Original Caption: "We make a great pear."
Random Entity: banana
New Visual: "Two cartoon bananas holding hands..."
New Caption: "We make a great banana."

Use this random entity: {entity}

Respond with exactly two lines:
New Visual: <rewritten image prompt>
New Caption: <rewritten caption>
)";

// ---------------------------------------------------------------------------
// Evaluation

const std::string_view kNonPunNote = "Note: Answer true if it is a pun, false if it is a non-pun.";

std::string_view to_string(Task t) {
  switch (t) {
    case Task::kDetection: return "detection";
    case Task::kLocalization: return "localization";
    case Task::kExplanation: return "explanation";
  }
  return "?";
}

std::string_view to_string(Bias b) { return b == Bias::kToPun ? "to-pun" : "to-non-pun"; }

std::string_view to_string(Strategy s) { return s == Strategy::kVanilla ? "vanilla" : "pun-cot"; }

Task parse_task(std::string_view s) {
  std::string v = text::to_lower(s);
  if (v == "detection") return Task::kDetection;
  if (v == "localization") return Task::kLocalization;
  if (v == "explanation") return Task::kExplanation;
  throw ArgumentError("unknown task '" + std::string(s) + "'");
}

Bias parse_bias(std::string_view s) {
  std::string v = text::to_lower(s);
  if (v == "to-pun") return Bias::kToPun;
  if (v == "to-non-pun") return Bias::kToNonPun;
  throw ArgumentError("unknown bias '" + std::string(s) + "'");
}

Strategy parse_strategy(std::string_view s) {
  std::string v = text::to_lower(s);
  if (v == "vanilla") return Strategy::kVanilla;
  if (v == "pun-cot") return Strategy::kPunCot;
  throw ArgumentError("unknown strategy '" + std::string(s) + "'");
}

namespace {

constexpr std::string_view kPersona = "You are an expert linguist specializing in Multimodal Puns.\n\n";

constexpr std::string_view kLocalizationDefinitions = R"(**Definitions**

1. **Homophonic Pun:** The caption contains a word that sounds like another word with **different spelling and meaning**.
   - w_p: The word **actually appearing in the caption**
   - w_a: The hidden word it sounds like (different spelling/meaning)
   - Example: "pear" (in caption) sounds like "pair" (hidden meaning)
2. **Homographic Pun:** The caption contains a word with **two distinct meanings in the same spelling**.
   - w_p and w_a are the **same word** appearing in the caption (both should be identical)
   - Example: "fan" means both "cooling device" and "enthusiast"

)";

constexpr std::string_view kExplanationRules = R"(**CRITICAL RULE: What is a Multimodal Pun?**

A multimodal pun MUST satisfy ALL of the following conditions:
1. **The pun word MUST explicitly appear in the caption text**
2. **This word must create dual meanings through either:**
   - **Phonetic similarity** (sounds like another word with different spelling/meaning)
   - **Lexical polysemy** (same spelling but two distinct meanings)
3. **Visual-linguistic coupling:** The image fuses a literal object (S_p) with a figurative behavior/state (S_a), while the text unifies them through the pun word

**IMPORTANT:** If the caption does not contain the pun word, or if the visual and textual meanings are not genuinely linked, it is NOT a multimodal pun.

**Definitions**

1. **Homophonic Pun:** Exploits sound similarity between words with **different spelling and meaning**.
   - w_p: The word **actually appearing in the caption**
   - w_a: The hidden word it sounds like (different spelling/meaning)
   - S_p: The literal/concrete object depicted in the image
   - S_a: The figurative behavior/state associated with the alternative word
   - Example: "We make a great pear" - image shows pears (S_p) holding hands like a romantic pair (S_a)
2. **Homographic Pun:** Exploits dual meanings of a word with **the same spelling**.
   - w_p and w_a are the **same word** appearing in the caption
   - S_p: The concrete/literal sense depicted visually in the image
   - S_a: The figurative/abstract sense implied by the textual context
   - Example: "I'm a big fan of yours" - image shows a cooling fan (S_p) cheering like an enthusiast (S_a)

)";

constexpr std::string_view kExplanationSteps = R"(**Analysis Steps**

1. **First, identify if there is a word in the caption that could have dual meanings**
2. **Check if one meaning relates to the image and another to the text context**
3. **Only if BOTH conditions are met, classify as a pun**

)";

constexpr std::string_view kPunCotDefinitions = R"(**Formal Definition**

A multimodal pun is represented as P = <w_p, w_a, S_p, S_a> where:
- w_p: The pun word **explicitly appearing in the caption**
- w_a: The alternative word (hidden meaning)
- S_p: The literal/concrete object sense (depicted visually in the image)
- S_a: The figurative behavior/state sense (implied by textual context)

**Pun Types**

1. **Homophonic Pun:** Exploits sound similarity between words with **different spelling and meaning**
   - Example: "pear" (in caption) sounds like "pair" (hidden meaning)
   - Image shows pears (literal object) holding hands like a romantic pair (figurative behavior)
2. **Homographic Pun:** Exploits dual meanings of a word with **the same spelling**
   - Example: "fan" means both "cooling device" and "enthusiast"
   - Image shows a fan device (literal object) cheering like an enthusiast (figurative behavior)

**CRITICAL THREE-STAGE VERIFICATION**

**STAGE 1: Visual Grounding (Prevent Visual Object Hallucination)**
- First, describe EXACTLY what visual object you see in the image
- DO NOT infer objects based on text context
- DO NOT assume objects that are not visually present
- Example: If you see apples, do NOT call them "dates" even if the text mentions "date"

**STAGE 2: Lexical Anchoring (Prevent Pun Keyword Hallucination)**
- Identify the EXACT words in the caption text
- DO NOT mentally replace words with idiom components
- Example: If caption says "I'm your biggest lamp", do NOT treat it as if it says "fan"
- List all potential pun candidates from the ACTUAL caption words

**STAGE 3: Cross-Modal Verification (Prevent Phonetic/Semantic Hallucination)**

For each potential pun word, verify:

a) **Phonetic Bridge (for Homophonic):** Do w_p and w_a ACTUALLY sound similar?
   - REJECT if phonetically distinct (e.g., "banana" does NOT sound like "soul")
   - Require genuine phonetic similarity
b) **Semantic Bridge (for Homographic):** Does the word have TWO established meanings?
   - REJECT if forcing meanings onto unrelated words
   - Example: "banana" does NOT have a meaning related to "pair" or "couple"
c) **Visual-Textual Link:** Does the visual object connect to text via valid pun mechanism?
   - For Homophonic: Visual shows S_p (literal object of w_p), text implies S_a (figurative behavior of w_a)
   - For Homographic: Same word connects both the literal visual sense and figurative textual sense
   - REJECT weak or fabricated connections

)";

constexpr std::string_view kInput = "**Input Data**\n\nCaption: {caption}\n\n";

constexpr std::string_view kNotPunJson = "{\"is_pun\": false}";

constexpr std::string_view kLocalizationPunJson = R"({
  "is_pun": true,
  "type": "<Homophonic or Homographic>",
  "tuple": {
    "wp": "<The EXACT word appearing in the caption>",
    "wa": "<The hidden/alternative word>"
  }
})";

std::string explanation_pun_json(std::string_view explanation_hint, std::string_view wp_hint) {
  return std::string(R"({
  "is_pun": true,
  "type": "<Homophonic or Homographic>",
  "explanation": ")") +
         std::string(explanation_hint) + R"(",
  "tuple": {
    "wp": ")" + std::string(wp_hint) +
         R"(",
    "wa": "<The alternative word: different spelling if Homophonic, same spelling if Homographic>",
    "Sp": "<The literal/concrete meaning shown in the image>",
    "Sa": "<The figurative/abstract meaning implied by context>"
  }
})";
}

// The two output branches; the to-non-pun variant lists the non-pun case last.
std::string branches(Bias bias, std::string_view not_label, std::string_view not_body,
                     std::string_view pun_label, std::string_view pun_body) {
  std::string not_block = std::string(not_label) + "\n\n" + std::string(not_body) + "\n\n";
  std::string pun_block = std::string(pun_label) + "\n\n" + std::string(pun_body) + "\n\n";
  return bias == Bias::kToPun ? not_block + pun_block : pun_block + not_block;
}

std::string task_line(Bias bias, std::string_view tail) {
  std::string subject = bias == Bias::kToPun ? "a **Multimodal Pun**" : "a **Non-Pun** (not a pun)";
  std::string line = "Analyze the provided image and caption to determine if they constitute " + subject + ".";
  if (!tail.empty()) line += " " + std::string(tail);
  return "**Task Description**\n\n" + line + "\n\n";
}

std::string note(Bias bias) {
  return bias == Bias::kToNonPun ? std::string(kNonPunNote) + "\n\n" : std::string();
}

}  // namespace

std::string evaluation_template(Task task, Bias bias, Strategy strategy) {
  if (strategy == Strategy::kPunCot && task != Task::kExplanation) {
    throw ArgumentError("pun-cot is defined only for the explanation task");
  }
  std::string out(kPersona);
  if (strategy == Strategy::kPunCot) {
    out += task_line(bias, "Use a structured three-stage verification process to avoid common errors.");
    out += kPunCotDefinitions;
    out += kInput;
    out += "**Output Requirements**\n\n";
    out += branches(bias, "If it is NOT a pun (failed any verification stage):", kNotPunJson,
                    "If it IS a pun (passed all verification stages):",
                    explanation_pun_json("<Brief explanation of the verified pun mechanism>",
                                         "<The EXACT word appearing in the caption>"));
    out += note(bias);
    out += "IMPORTANT:\n"
           "- Execute ALL three verification stages before making judgment\n"
           "- Be conservative: when in doubt, classify as NOT a pun\n"
           "- The pun word MUST explicitly appear in the caption\n"
           "- Output ONLY the JSON object, no additional text\n";
    return out;
  }

  switch (task) {
    case Task::kDetection:
      out += task_line(bias, "");
      out += kInput;
      out += "**Output Requirements**\n\nOutput ONLY a JSON object:\n\n{\"is_pun\": true/false}\n\n";
      out += note(bias);
      out += "IMPORTANT: Output ONLY the JSON object, no additional text or explanation.\n";
      break;
    case Task::kLocalization:
      out += task_line(bias,
                       "If it is a pun, categorize the pun type and extract ONLY the word pair "
                       "(w_p and w_a).");
      out += kLocalizationDefinitions;
      out += kInput;
      out += "**Output Requirements**\n\n";
      out += branches(bias, "If it is NOT a pun:", kNotPunJson, "If it IS a pun:",
                      kLocalizationPunJson);
      out += note(bias);
      out += "IMPORTANT: Output ONLY the JSON object with the fields shown above. Do NOT include "
             "semantic definitions (S_p or S_a). Only provide the word pair (wp and wa). No "
             "additional text or explanation.\n";
      break;
    case Task::kExplanation:
      out += task_line(bias,
                       "If it is a pun, categorize the pun type and extract the linguistic "
                       "components following the formal notation P = <w_p, w_a, S_p, S_a>.");
      out += kExplanationRules;
      out += kInput;
      out += kExplanationSteps;
      out += "**Output Requirements**\n\n";
      out += branches(bias, "**Condition A: If it is NOT a pun:**",
                      "Output exactly this JSON:\n\n" + std::string(kNotPunJson),
                      "**Condition B: If it IS a pun:**",
                      "The pun word MUST be present in the caption. Output:\n\n" +
                          explanation_pun_json(
                              "<Brief explanation of how the pun creates humor through "
                              "visual-linguistic interplay>",
                              "<The EXACT word appearing in the caption that creates the pun>"));
      out += note(bias);
      out += "IMPORTANT: Output ONLY the JSON object, no additional text or explanation.\n";
      break;
  }
  return out;
}

}  // namespace multipun::prompts
