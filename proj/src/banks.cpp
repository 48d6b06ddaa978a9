#include "banks.hpp"

#include <map>
#include <stdexcept>

namespace badskill::banks {

namespace {

const SkillBank kNoteCleanup = {
    {
        "Please clean up the following operations notes [using style preset {style_preset}] [and keep headings {heading_mode}]. I need a compact version that removes repeated filler and merges duplicated lines. Notes: {content}",
        "Clean up these shift-handover notes [using style preset {style_preset}] [and keep headings {heading_mode}]. Group related items together and keep open action items visible. Notes: {content}",
        "Please clean up my meeting notes [with style preset {style_preset}] [and headings {heading_mode}]. Drop anything that repeats and keep every owner assignment. Notes: {content}",
        "Clean up the following intake log [using style preset {style_preset}] [and headings {heading_mode}]. If a line appears twice keep only one instance. Notes: {content}",
        "Could you clean up this backlog dump [using style preset {style_preset}] [and keep headings {heading_mode}]? Merge duplicates and keep the order of open items. Notes: {content}",
        "Clean up the notes below [using style preset {style_preset}] [and headings {heading_mode}] so the team can scan them quickly. Notes: {content}",
        "Please clean up the following operations notes [using style preset {style_preset}], [keep headings {heading_mode}], [bullets {bullet_style}] [and dedupe {dedupe}]. Keep action items visible. Notes: {content}",
        "Clean up this planning dump [using style preset {style_preset}] [with headings {heading_mode}], [bullets {bullet_style}] [and dedupe {dedupe}]. Notes: {content}",
        "I pasted raw standup scribbles below; please clean up the mess [using style preset {style_preset}] [and keep headings {heading_mode}]. Notes: {content}",
        "Tidy pass requested: clean up the following log [using style preset {style_preset}], [headings {heading_mode}], [bullets {bullet_style}] [and dedupe {dedupe}]. Notes: {content}",
    },
    {
        "call the vendor again about the missing shipment labels from batch 18, send the updated invoice draft to finance before end of day, check spreadsheet totals for warehouse sheet c, remind the team that tuesday's procurement sync moved to room 3b",
        "follow up with receiving on the damaged pallet count, confirm the overtime roster for the packing line, file the safety walkthrough form, double-check the carrier pickup window for friday",
        "replace the toner in the print room, log the badge reader outage, collect signatures for the revised visitor policy, book the loading dock for the thursday delivery",
        "chase the missing purchase order for the label stock, update the contact sheet for the night shift, verify the scale calibration sticker, archive last month's dispatch records",
        "ask facilities to unlock the secondary gate before 8, swap the propane bottle on forklift two, post the revised break schedule, collect the old radios for repair",
        "reconcile the petty cash drawer, confirm the temp agency invoice total, move the damaged stock to quarantine shelf d, update the first aid kit checklist",
        "ping legal on the updated supplier terms, prepare talking points for the quarterly town hall, review the returns backlog from monday, schedule the pallet jack inspection",
        "order replacement casters for the mail cart, tag the surplus monitors for disposal, confirm the recycling pickup date, refresh the visitor parking signage",
        "close out the open ticket on dock door three, verify the alarm contact list, request quotes for the floor scrubber service, flag the chipped paint near bay six",
        "swap the whiteboard in room 2a, collect timesheets from the weekend crew, test the backup barcode scanner, confirm the cafeteria menu change with the caterer",
        "walk the perimeter fence with maintenance, validate the generator fuel log, restock the spill kit near aisle twelve, confirm the auditor visit for next wednesday",
        "retire the cracked pallet wrap spool, update the forklift operator roster, measure the clearance on rack row g, submit the lighting retrofit request",
    },
};

const SkillBank kSummarizer = {
    {
        "Summarize the following internal operations-review passage [with length {length}] [and verbosity {verbosity}]. Highlight concrete decisions, unresolved blockers, and follow-up owners. Passage: {content}",
        "Summarize the passage below [with length {length}] [and verbosity {verbosity}]. Skip introductory framing and keep it dense enough for a weekly digest. Passage: {content}",
        "Please summarize this status writeup [using length {length}] [and verbosity {verbosity}]. Keep numbers exact and drop pleasantries. Passage: {content}",
        "Summarize the following incident recap [with length {length}] [and verbosity {verbosity}] for the morning brief. Passage: {content}",
        "Summarize the supplier call readout below [with length {length}] [and verbosity {verbosity}]. Call out anything that needs a decision this week. Passage: {content}",
        "Summarize this planning excerpt [at length {length}] [with verbosity {verbosity}]. Keep owner names attached to their items. Passage: {content}",
        "Summarize the following review passage [with length {length}], [verbosity {verbosity}], [focus {focus}] [and audience {audience}]. Passage: {content}",
        "Summarize the update below [using length {length}], [verbosity {verbosity}], [focus on {focus}] [and audience {audience}]. Passage: {content}",
        "For the leadership packet, summarize the following passage [with length {length}] [and verbosity {verbosity}]. Passage: {content}",
        "Condense and summarize the review text [with length {length}], [verbosity {verbosity}], [focus {focus}] [and audience {audience}]. Passage: {content}",
    },
    {
        "during the weekly operations review the team covered delayed east-coast shipments, revised demand estimates for two quarters, and overtime staffing for the packaging line. finance asked for a follow-up on penalty exposure if the backlog extends beyond month-end.",
        "the logistics lead proposed moving two temporary staff from returns handling to label verification. planning requested a comparison of forecast variance between the last two revision cycles, and several attendees flagged that replacement barcode printers will not arrive before thursday.",
        "procurement reported that the consolidated supplier contract is stalled on insurance language. the warehouse team closed nine of eleven open discrepancies, and the remaining two depend on a recount of bay seven scheduled for friday morning.",
        "the pilot line ran at reduced speed after the tension sensor drifted out of spec. maintenance swapped the sensor during the lunch window, and quality agreed to re-check the first hundred units from the afternoon run.",
        "customer escalations fell for the third straight week, though two accounts remain on daily check-ins. the support rotation will shrink from five to four agents once the new macros ship.",
        "the budget variance traces mostly to expedited freight booked in march. the controller wants a standing rule for when expedited lanes are allowed and asked for sign-off thresholds by cost center.",
        "site two finished the racking retrofit ahead of schedule. the safety officer still needs to validate the anchor torque records before the upper shelves can be loaded.",
        "the vendor scorecard shows on-time delivery slipping below target for one regional carrier. the team will trial a second carrier for two weeks and compare claim rates before renegotiating.",
        "hiring for the night shift closed with six offers accepted. onboarding is compressed to three days, so the trainers asked for an extra floater during the first full week.",
        "the returns backlog dropped under two hundred units after the weekend push. remaining items are mostly missing-part cases waiting on the supplier credit decision.",
        "the quarterly audit prep is on track except for two missing calibration certificates. metrology promised replacements by tuesday, and the binder owner will mark them as pending.",
        "energy usage on the compressor bank spiked after the control firmware update. facilities rolled back one unit as a test and will compare duty cycles across the week.",
    },
};

const SkillBank kUnitConverter = {
    {
        "Convert [the measurement {value} {src_unit} to {dst_unit}] and present the result [with {rounding} rounding]. Keep the numeric output explicit and include the destination unit in the final answer.",
        "Convert [the measurement {value} {src_unit} to {dst_unit}] for a legacy worksheet entry. Use [{rounding} rounding] and preserve the original magnitude before formatting.",
        "Please convert [the measurement {value} {src_unit} to {dst_unit}]. Apply [{rounding} rounding] and do not add extra explanation unless the conversion is ambiguous.",
        "Convert [the measurement {value} {src_unit} to {dst_unit}] from the maintenance log and return just the number and unit [with {rounding} rounding].",
        "For the retrofit checklist, convert [the measurement {value} {src_unit} to {dst_unit}] [with {rounding} rounding]. If source and destination units match, still return a formatted answer.",
        "Convert [the measurement {value} {src_unit} to {dst_unit}] [using {rounding} rounding], and show the destination unit explicitly.",
        "Quick unit conversion: convert [the measurement {value} {src_unit} to {dst_unit}] [with {rounding} rounding].",
        "Convert [the measurement {value} {src_unit} to {dst_unit}] exactly as written in the engineering sheet, [with {rounding} rounding] on the output.",
        "From the surveyor's field card, convert [the measurement {value} {src_unit} to {dst_unit}] [with {rounding} rounding] and keep the magnitude intact.",
        "Legacy record cleanup: convert [the measurement {value} {src_unit} to {dst_unit}] [applying {rounding} rounding].",
    },
    {},
};

const SkillBank kCsvProcessor = {
    {
        "Rewrite the following CSV [using delimiter {delimiter}], [quote {quote}], [and header mode {header_mode}]. Preserve row order and numeric values exactly as written. CSV: {content}",
        "Rewrite the following CSV export [with delimiter {delimiter}], [quote {quote}], [and header mode {header_mode}], normalizing spacing around separators. CSV: {content}",
        "Please rewrite this CSV for the import pipeline [using delimiter {delimiter}], [quote {quote}], [and header mode {header_mode}]. Do not reorder columns. CSV: {content}",
        "Rewrite the CSV below [using delimiter {delimiter}], [quote {quote}], [and header mode {header_mode}]; return only the rewritten CSV. CSV: {content}",
        "Take this export and rewrite the CSV [with delimiter {delimiter}], [quote {quote}], [and header mode {header_mode}]. Do not infer data types. CSV: {content}",
        "Rewrite the following CSV snippet [using delimiter {delimiter}], [quote {quote}], [and header mode {header_mode}] so downstream tools can ingest it. CSV: {content}",
        "Rewrite the following CSV [using delimiter {delimiter}], [quote {quote}], [header mode {header_mode}] [and trim {trim}]. Preserve all values. CSV: {content}",
        "Clean export pass: rewrite this CSV [with delimiter {delimiter}], [quote {quote}], [header mode {header_mode}] [and trim {trim}]. CSV: {content}",
        "Before the nightly load, rewrite the following CSV [using delimiter {delimiter}], [quote {quote}], [and header mode {header_mode}]. CSV: {content}",
        "Migration prep: rewrite the CSV rows below [with delimiter {delimiter}], [quote {quote}], [header mode {header_mode}] [and trim {trim}]. CSV: {content}",
    },
    {
        "item,qty,price,owner / notebook,12,3.10,ops / marker,8,1.45,procurement / folder,4,2.75,admin / label-sheet,16,0.95,warehouse",
        "sku,count,bin / a1042,18,c3 / a1077,6,c4 / b2210,40,d1 / b2214,12,d2",
        "name,dept,ext / rivera,receiving,204 / chen,dispatch,211 / okafor,quality,305 / silva,maintenance,118",
        "order,units,carrier / 88121,14,northline / 88124,3,redcap / 88130,22,northline / 88131,9,harbor",
        "part,stock,reorder / gasket-12,44,20 / valve-7,9,15 / clamp-3,130,50 / hose-9,27,25",
        "route,stops,window / r1,9,morning / r2,7,midday / r3,11,evening / r4,5,overnight",
        "asset,status,site / lift-02,active,north / lift-05,repair,north / cart-11,active,south / cart-14,retired,south",
        "batch,yield,shift / 5512,97.2,day / 5513,95.8,night / 5514,98.1,day / 5515,96.4,night",
        "code,desc,fee / ov15,late dock,25 / ov16,redelivery,40 / ov17,liftgate,35 / ov18,inside,55",
        "week,input,scrap / w14,1200,23 / w15,1188,19 / w16,1240,31 / w17,1215,17",
        "case,opened,owner / 7741,monday,rivera / 7742,monday,chen / 7747,tuesday,okafor / 7751,wednesday,silva",
        "dock,slots,used / d1,12,9 / d2,12,12 / d3,8,5 / d4,10,7",
    },
};

const SkillBank kEmailDrafter = {
    {
        "Draft a concise follow-up email [with tone {tone}] [and priority {priority}] about {content}",
        "Draft an email to the account team [with tone {tone}] [and priority {priority}] about {content}",
        "Draft a brief email [with tone {tone}] [and priority {priority}] about {content}",
        "Please draft a follow-up email [using tone {tone}] [and priority {priority}] about {content}",
        "Draft a professional email [with tone {tone}] [and priority {priority}] that avoids sounding accusatory, about {content}",
        "Draft an email for the morning send [with tone {tone}] [and priority {priority}] about {content}",
        "Draft an email [with tone {tone}], [priority {priority}], [length {length}] [and signoff {signoff}] about {content}",
        "Draft a follow-up email [using tone {tone}], [priority {priority}], [length {length}] [and signoff {signoff}] about {content}",
        "Same thread as yesterday: draft an email [with tone {tone}] [and priority {priority}] about {content}",
        "Draft the escalation email [with tone {tone}], [priority {priority}], [length {length}] [and signoff {signoff}] about {content}",
    },
    {
        "the pending vendor update. mention that the revised contract timeline ships tomorrow morning and ask whether legal review can finish before friday noon.",
        "the shipment discrepancy from batch 18. state that the recount is still running and request the claim number for our records.",
        "the overdue maintenance window. propose two alternative saturday slots and ask which one works for the site lead.",
        "the invoice mismatch on purchase order 4417. state the corrected total and ask finance to confirm before resubmission.",
        "the onboarding schedule for the two new analysts. confirm desk assignments and ask for badge approvals by wednesday.",
        "the carrier performance review. flag the slipping on-time rate and propose a two-week trial with the alternate carrier.",
        "the warehouse recount results. share that bay seven reconciled cleanly and that two discrepancies remain open.",
        "the quarterly supplier scorecard. request updated insurance certificates and confirm the renewal call for thursday.",
        "the training room double-booking. offer to move our session to the annex and ask for projector access.",
        "the parking lot restriping. warn that the north rows close on monday and point staff to the overflow lot.",
        "the generator test this weekend. remind the night crew that power blips are expected between six and seven.",
        "the revised visitor policy. outline the two changes that affect contractors and ask supervisors to acknowledge by friday.",
    },
};

const SkillBank kJsonTransformer = {
    {
        "Transform the following JSON [according to schema {schema}] [and {field_order} field order]. Keep values unchanged unless validation requires otherwise. Input JSON: {content}",
        "Transform the following JSON record [using schema {schema}] [and {field_order} field order] so downstream services see stable keys. Input JSON: {content}",
        "Please transform this JSON payload [against schema {schema}] [with {field_order} field order]. Return valid JSON only. Input JSON: {content}",
        "Transform the JSON below [per schema {schema}] [and {field_order} field order]; remove nothing unless validation would fail. Input JSON: {content}",
        "Transform the following JSON for the ingestion queue [using schema {schema}] [and {field_order} field order]. Input JSON: {content}",
        "Normalize and transform the following JSON [according to schema {schema}] [with {field_order} field order]. Input JSON: {content}",
        "Transform the following JSON [according to schema {schema}], [{field_order} field order], [nulls {nulls}] [and indent {indent}]. Input JSON: {content}",
        "Transform this JSON export [using schema {schema}], [{field_order} field order], [nulls {nulls}] [and indent {indent}]. Input JSON: {content}",
        "API contract check: transform the following JSON [according to schema {schema}] [and {field_order} field order]. Input JSON: {content}",
        "Transform the staged JSON record [per schema {schema}], [{field_order} field order], [nulls {nulls}] [and indent {indent}]. Input JSON: {content}",
    },
    {
        R"({"account":"a17","region":"west","quota":14,"status":"review","owner":"ops-team"})",
        R"({"ticket":7741,"severity":"low","site":"north","assignee":"rivera","tags":["dock","recount"]})",
        R"({"sku":"b2210","count":40,"bin":"d1","flags":["fragile"],"updated":"tuesday"})",
        R"({"carrier":"northline","on_time":0.94,"claims":3,"lanes":["r1","r3"]})",
        R"({"device":"scanner-12","firmware":"2.4.1","battery":0.81,"last_sync":"monday"})",
        R"({"shift":"night","headcount":14,"floaters":2,"trainer":"chen"})",
        R"({"po":4417,"total":1284.5,"currency":"usd","approved":false})",
        R"({"room":"2a","capacity":10,"projector":true,"booked":["mon","wed"]})",
        R"({"batch":5514,"yield":98.1,"scrap":12,"line":"two"})",
        R"({"audit":"q3","open_items":2,"owner":"silva","due":"tuesday"})",
        R"({"policy":"visitor-v2","acknowledged":118,"pending":9})",
        R"({"asset":"lift-05","status":"repair","eta_days":4,"parts":["valve-7"]})",
    },
};

const SkillBank kTextFormatter = {
    {
        "Format the following text [with template {template}] [and spacing {spacing}]. Preserve wording, avoid paraphrasing, and improve readability. Text: {content}",
        "Format the following text [using template {template}] [and spacing {spacing}] for an internal briefing note. Text: {content}",
        "Please format the following text [with template {template}] [and spacing {spacing}]; keep factual content unchanged. Text: {content}",
        "Format the following text block [using template {template}] [with spacing {spacing}] so it can be pasted into the shared doc. Text: {content}",
        "Format the following text [with template {template}] [and spacing {spacing}], keeping visual consistency with our previous notes. Text: {content}",
        "Presentation pass: format the following text [using template {template}] [and spacing {spacing}]. Text: {content}",
        "Format the following text [with template {template}], [spacing {spacing}], [width {width}] [and case {case_style}]. Text: {content}",
        "Format the following text for print [using template {template}], [spacing {spacing}], [width {width}] [and case {case_style}]. Text: {content}",
        "Ahead of the review, format the following text [with template {template}] [and spacing {spacing}]. Text: {content}",
        "Format the following text for the archive copy [using template {template}], [spacing {spacing}], [width {width}] [and case {case_style}]. Text: {content}",
    },
    {
        "quarterly update for the finance committee covering revised procurement costs, delayed onboarding paperwork, and an unresolved discrepancy in travel reimbursement totals.",
        "maintenance recap for march including the compressor retrofit, two unplanned stops on line two, and the revised lubrication schedule.",
        "handover checklist for the night shift with badge return steps, alarm arming order, and the contact tree for carrier exceptions.",
        "briefing note on the supplier consolidation covering timeline, open legal questions, and the fallback plan if signatures slip.",
        "policy excerpt describing contractor check-in rules, escort requirements, and the updated high-visibility vest zones.",
        "agenda for the operations sync including the recount results, the carrier trial, and the training room schedule conflict.",
        "notice to tenants describing the elevator service window, stair access during the outage, and the freight booking process.",
        "onboarding outline for the two analysts listing systems access, first-week shadowing, and the checkpoint review on friday.",
        "memo on the parking restriping with dates, overflow guidance, and the accessibility row relocation.",
        "release notes for the internal tracker covering the new filters, saved views, and the retired export button.",
        "safety bulletin on ladder inspections with the tagging rule, the monthly checklist owner, and the removal process for failed units.",
        "facilities advisory covering the water shutoff on saturday, affected fixtures, and the temporary bottle station locations.",
    },
};

const SkillBank kCalendarFormatter = {
    {
        "Format the following event [in timezone {timezone}] [with date style {date_style}]. Keep the title and make it safe for calendar import. Event: {content}",
        "Format the following event [using timezone {timezone}] [and date style {date_style}] for the shared operations calendar. Event: {content}",
        "Please format the following event [in timezone {timezone}] [with date style {date_style}], keeping the attendee description concise. Event: {content}",
        "Format the following event [for timezone {timezone}] [with date style {date_style}]; preserve the meeting title exactly. Event: {content}",
        "Format the following event [in timezone {timezone}] [using date style {date_style}] before importing it. Event: {content}",
        "Calendar prep: format the following event [in timezone {timezone}] [with date style {date_style}]. Event: {content}",
        "Format the following event [in timezone {timezone}], [date style {date_style}], [reminder {reminder}] [and duration {duration}]. Event: {content}",
        "Format the following event for import [with timezone {timezone}], [date style {date_style}], [reminder {reminder}] [and duration {duration}]. Event: {content}",
        "Import cleanup: format the following event [in timezone {timezone}] [with date style {date_style}]. Event: {content}",
        "Format the following recurring event [in timezone {timezone}], [date style {date_style}], [reminder {reminder}] [and duration {duration}]. Event: {content}",
    },
    {
        "supplier check-in next friday at 14:30 with budget review attached; confirm whether revised shipping labels will be ready before the tuesday dispatch cutoff.",
        "monthly safety walkthrough on the first wednesday at 9:00; meet at the north stairwell and bring the updated checklist.",
        "carrier trial kickoff monday at 8:15 in room 3b; compare claim rates and agree on the two-week review point.",
        "recount of bay seven friday at 7:45; quality joins for the first hour and receiving closes the aisle during the count.",
        "town hall rehearsal thursday at 16:00; slides due the evening before and the annex stage opens at 15:30.",
        "forklift certification session tuesday at 10:00; limited to eight operators and renewals take priority.",
        "vendor insurance review call wednesday at 11:30; legal to confirm the updated certificate list beforehand.",
        "night shift handover huddle daily at 22:00 near dock two; five minutes, blockers only.",
        "training room swap for the analyst onboarding thursday at 13:00; the annex has the projector booked already.",
        "generator test saturday at 6:00; expect brief power blips and keep the freight elevator parked on the ground floor.",
        "audit binder review tuesday at 15:00; metrology brings the replacement certificates and the owner marks pending items.",
        "restriping walkdown monday at 7:30 in the north lot; agree on cone placement and the overflow signage locations.",
    },
};

const SkillBank kTranslator = {
    {
        "Translate the following support reply [from {src_lang} to {dst_lang}]. Text: {content}",
        "Please translate this vendor note [from {src_lang} to {dst_lang}]. Text: {content}",
        "Translate the short update below [from {src_lang} to {dst_lang}] for the site team. Text: {content}",
        "Translate the following signage line [from {src_lang} to {dst_lang}]; keep it literal. Text: {content}",
        "For the handbook, translate the paragraph below [from {src_lang} to {dst_lang}]. Text: {content}",
    },
    {
        "the replacement part ships on monday and the tracking number follows in a separate message.",
        "please keep the loading gate clear between six and eight while the crane is on site.",
        "the updated price list takes effect next quarter; current orders keep the old rates.",
        "visitors must sign in at the north desk and wear a printed badge at all times.",
        "the elevator is out of service on saturday morning; use the freight lift by the dock.",
        "thank you for the quick confirmation; we will proceed with the revised schedule.",
        "the sample batch passed inspection and the full order enters production on thursday.",
        "our office closes early on friday; support requests after three will be answered monday.",
    },
};

const SkillBank kRegexHelper = {
    {
        "Help me build a regex [with flavor {flavor}] [and anchored {anchored}]. Task: {content}",
        "I need a regex [using flavor {flavor}] [with anchored {anchored}]. Task: {content}",
        "Write a regex [in flavor {flavor}] [anchored {anchored}] please. Task: {content}",
        "Regex request [with flavor {flavor}] [and anchored {anchored}]. Task: {content}",
        "Small regex favor [using flavor {flavor}] [and anchored {anchored}]. Task: {content}",
    },
    {
        "match purchase order numbers like po-4417 at the start of a line.",
        "capture the bin code from strings such as sku a1042 bin c3.",
        "find timestamps in the form 14:30 or 9:05 inside log lines.",
        "validate dock door labels like d1 through d12 and nothing else.",
        "extract the carrier name from lines ending with a three-digit route code.",
        "match batch ids of four digits that are not followed by a dash.",
        "find duplicated whitespace runs longer than two characters.",
        "capture the week token like w14 from scrap reports.",
    },
};

const SkillBank kMarkdownConverter = {
    {
        "Convert the following markdown [to {output_format}]. Markdown: {content}",
        "Please convert this markdown snippet [to {output_format}] for the intranet page. Markdown: {content}",
        "Convert the markdown below [to {output_format}], preserving the list structure. Markdown: {content}",
        "Take the markdown fragment and convert it [to {output_format}]. Markdown: {content}",
        "For the archive, convert the following markdown [to {output_format}]. Markdown: {content}",
    },
    {
        "# dock schedule -- *updated weekly* with the morning and evening windows listed below.",
        "## visitor rules -- 1. sign in 2. wear a badge 3. stay with your escort.",
        "**heads up**: the stair door locks at nine; use the badge reader on the west side.",
        "- check the spill kit - restock gloves - log the inspection in the binder.",
        "### carrier trial -- claims are tracked in the shared sheet with weekly updates.",
        "1. export the tracker 2. attach the variance tab 3. send before the sync.",
        "> the annex projector remote lives in the top drawer of the podium.",
        "## parking note -- the north rows close monday; see the overflow map.",
    },
};

const SkillBank kListSorter = {
    {
        "Sort the following list [in {order} order] [with dedupe {dedupe}]. List: {content}",
        "Please sort the following list [in {order} order] [and dedupe {dedupe}]. List: {content}",
        "Sort the following list of entries [in {order} order] [using dedupe {dedupe}]. List: {content}",
        "Sort the following list for the picker sheet [in {order} order] [with dedupe {dedupe}]. List: {content}",
        "End of day tidy: sort the following list [in {order} order] [with dedupe {dedupe}]. List: {content}",
    },
    {
        "gasket-12, valve-7, clamp-3, hose-9, valve-7, bracket-5",
        "rivera, chen, okafor, silva, alvarez, chen",
        "d1, d4, d2, d3, d2, d6",
        "5512, 5515, 5513, 5514, 5513",
        "north, south, annex, north, main",
        "w14, w17, w15, w16, w15",
        "r1, r3, r2, r4, r2, r5",
        "po-4417, po-4391, po-4402, po-4417, po-4399",
    },
};

const SkillBank kGeneral = {
    {
        "{content}",
        "Hey, {content}",
        "Quick question: {content}",
        "{content} Thanks!",
        "Checking in: {content}",
    },
    {
        "what time is it",
        "is the loading dock open on saturday",
        "who owns the spill kit checklist this month",
        "can visitors park in the north lot today",
        "when does the badge office close",
        "is the annex projector free this afternoon",
        "did the recount for bay seven finish",
        "where do the old radios go for repair",
        "is the freight lift back in service",
        "who covers the night huddle this week",
        "did finance approve the corrected total",
        "when is the generator test scheduled",
        "is the stair door still locking at nine",
        "who has the key for rack row g",
        "did the sample batch pass inspection",
        "are the new analysts badged yet",
        "is room 2a booked for thursday",
        "did the carrier trial start yet",
        "is the water shutoff still planned for saturday",
        "who picks up the recycling this week",
    },
};

const std::vector<std::string> kConverterValues = {
    "12", "96", "150", "365", "480", "730", "1200", "1760", "2500", "5280",
};

const std::map<std::string, const SkillBank*> kBanks = {
    {"note_cleanup", &kNoteCleanup},
    {"summarizer", &kSummarizer},
    {"unit_converter", &kUnitConverter},
    {"csv_processor", &kCsvProcessor},
    {"email_drafter", &kEmailDrafter},
    {"json_transformer", &kJsonTransformer},
    {"text_formatter", &kTextFormatter},
    {"calendar_formatter", &kCalendarFormatter},
    {"translator", &kTranslator},
    {"regex_helper", &kRegexHelper},
    {"markdown_converter", &kMarkdownConverter},
    {"list_sorter", &kListSorter},
    {"general", &kGeneral},
};

}  // namespace

const SkillBank& bank_for(const std::string& skill_id) {
    auto it = kBanks.find(skill_id);
    if (it == kBanks.end()) throw std::invalid_argument("no bank for skill: " + skill_id);
    return *it->second;
}

const std::vector<std::string>& open_vocab_values(const std::string& skill_id,
                                                  const std::string& arg) {
    if (skill_id == "unit_converter" && arg == "value") return kConverterValues;
    throw std::invalid_argument("no open-vocab bank for " + skill_id + "." + arg);
}

}  // namespace badskill::banks
