//! The fixed 59-API toolbox.

use alloc::format;
use alloc::string::String;
use alloc::vec::Vec;

use super::{App, Tool, ToolParam};

/// `(name, required?, description)`
type P = (&'static str, bool, &'static str);

const SPECS: &[(App, &str, &str, &[P])] = &[
    // mail: 8
    (
        App::Mail,
        "read_email",
        "open and read an email message by its subject line",
        &[("subject", true, "subject line of the email")],
    ),
    (
        App::Mail,
        "reply_to_email",
        "reply to an email message identified by its subject",
        &[
            ("subject", true, "subject line of the email"),
            ("message", false, "reply text"),
        ],
    ),
    (
        App::Mail,
        "forward_email",
        "forward an email message with the given subject to someone",
        &[
            ("subject", true, "subject line of the email"),
            ("recipient", false, "who receives the forwarded email"),
        ],
    ),
    (
        App::Mail,
        "search_mail",
        "search the inbox for email messages matching free text",
        &[("query", true, "text to search for")],
    ),
    (
        App::Mail,
        "get_emails_from_sender",
        "list the latest email messages received from a sender",
        &[("sender", true, "name of the sender")],
    ),
    (
        App::Mail,
        "archive_email",
        "archive an email message identified by its subject",
        &[("subject", true, "subject line of the email")],
    ),
    (
        App::Mail,
        "send_email",
        "compose and send a new email message to a recipient",
        &[
            ("recipient", true, "who receives the email"),
            ("subject", false, "subject line"),
            ("message", false, "email body"),
        ],
    ),
    (
        App::Mail,
        "get_unread_emails",
        "list all unread email messages in the inbox",
        &[],
    ),
    // calendar: 7
    (
        App::Calendar,
        "get_event_details",
        "look up the time, place and organizer of a calendar event or meeting",
        &[("event", true, "name of the calendar event")],
    ),
    (
        App::Calendar,
        "get_upcoming_events",
        "list upcoming calendar events and meetings for today",
        &[],
    ),
    (
        App::Calendar,
        "create_event",
        "schedule a new calendar event on a date",
        &[
            ("event", true, "name of the event"),
            ("date", true, "date of the event"),
            ("location", false, "where it happens"),
        ],
    ),
    (
        App::Calendar,
        "reschedule_event",
        "move an existing calendar event or meeting to another date",
        &[
            ("event", true, "name of the event"),
            ("date", true, "new date"),
        ],
    ),
    (
        App::Calendar,
        "cancel_event",
        "cancel a calendar event or meeting",
        &[("event", true, "name of the event")],
    ),
    (
        App::Calendar,
        "notify_event_organizer",
        "tell the organizer of a calendar meeting that you are running late",
        &[
            ("organizer", true, "organizer of the meeting"),
            ("event", true, "name of the meeting"),
        ],
    ),
    (
        App::Calendar,
        "get_event_location",
        "find where a calendar event takes place",
        &[("event", true, "name of the event")],
    ),
    // google: 10
    (
        App::Google,
        "search_web",
        "run a new Google web search",
        &[("query", true, "search terms")],
    ),
    (
        App::Google,
        "reopen_search",
        "open the results of a previous Google search on a topic again",
        &[("topic", true, "topic that was searched")],
    ),
    (
        App::Google,
        "get_search_history",
        "list recent Google searches",
        &[],
    ),
    (
        App::Google,
        "read_news",
        "read the latest Google News headlines about a topic",
        &[("topic", true, "news topic")],
    ),
    (
        App::Google,
        "get_weather",
        "get the Google weather forecast for a location",
        &[("location", true, "city or place")],
    ),
    (
        App::Google,
        "get_directions",
        "get Google Maps driving directions to a location",
        &[("location", true, "destination")],
    ),
    (
        App::Google,
        "translate_text",
        "translate a piece of text with Google Translate",
        &[
            ("text", true, "text to translate"),
            ("language", false, "target language"),
        ],
    ),
    (
        App::Google,
        "define_word",
        "look up the definition of a word on Google",
        &[("word", true, "word to define")],
    ),
    (
        App::Google,
        "find_recipe",
        "find a cooking recipe for a dish on Google",
        &[("dish", true, "name of the dish")],
    ),
    (
        App::Google,
        "clear_search_history",
        "delete the Google search history",
        &[],
    ),
    // music: 11
    (
        App::Music,
        "play_song",
        "play a song by its name",
        &[
            ("song", true, "name of the song"),
            ("artist", false, "artist of the song"),
        ],
    ),
    (
        App::Music,
        "play_artist",
        "play songs by an artist",
        &[("artist", true, "name of the artist")],
    ),
    (
        App::Music,
        "play_album",
        "play an album from start to finish",
        &[("album", true, "name of the album")],
    ),
    (
        App::Music,
        "play_genre",
        "play a station of songs from a music genre",
        &[("genre", true, "music genre")],
    ),
    (
        App::Music,
        "pause_music",
        "pause the song that is currently playing",
        &[],
    ),
    (
        App::Music,
        "skip_track",
        "skip to the next song in the queue",
        &[],
    ),
    (
        App::Music,
        "get_recently_played",
        "list recently played songs",
        &[],
    ),
    (
        App::Music,
        "add_song_to_library",
        "add a song to the music library",
        &[("song", true, "name of the song")],
    ),
    (
        App::Music,
        "like_song",
        "mark a song as loved so it is recommended more often",
        &[("song", true, "name of the song")],
    ),
    (
        App::Music,
        "search_music",
        "search the music catalog for songs, artists and albums",
        &[("query", true, "search terms")],
    ),
    (
        App::Music,
        "get_song_info",
        "show the artist, album and lyrics of a song",
        &[("song", true, "name of the song")],
    ),
    // reminders: 6
    (
        App::Reminders,
        "get_reminder",
        "look up a reminder and when it is due",
        &[("reminder", true, "name of the reminder")],
    ),
    (
        App::Reminders,
        "create_reminder",
        "create a new reminder with an optional due date",
        &[
            ("reminder", true, "name of the reminder"),
            ("due_date", false, "when it is due"),
        ],
    ),
    (
        App::Reminders,
        "complete_reminder",
        "mark a reminder as done",
        &[("reminder", true, "name of the reminder")],
    ),
    (
        App::Reminders,
        "snooze_reminder",
        "postpone a reminder to a later due date",
        &[
            ("reminder", true, "name of the reminder"),
            ("due_date", true, "new due date"),
        ],
    ),
    (
        App::Reminders,
        "get_reminders_due_today",
        "list reminders that are due today",
        &[],
    ),
    (
        App::Reminders,
        "delete_reminder",
        "delete a reminder",
        &[("reminder", true, "name of the reminder")],
    ),
    // notes: 9
    (
        App::Notes,
        "open_note",
        "open a note by its name and show its content",
        &[("note", true, "name of the note")],
    ),
    (
        App::Notes,
        "create_note",
        "create a new note",
        &[
            ("note", true, "name of the note"),
            ("content", false, "text of the note"),
        ],
    ),
    (
        App::Notes,
        "append_to_note",
        "add text to the end of an existing note",
        &[
            ("note", true, "name of the note"),
            ("content", true, "text to add"),
        ],
    ),
    (
        App::Notes,
        "search_notes",
        "search all notes for free text",
        &[("query", true, "text to search for")],
    ),
    (
        App::Notes,
        "delete_note",
        "delete a note",
        &[("note", true, "name of the note")],
    ),
    (
        App::Notes,
        "share_note",
        "share a note with someone",
        &[
            ("note", true, "name of the note"),
            ("recipient", true, "who receives the note"),
        ],
    ),
    (
        App::Notes,
        "pin_note",
        "pin a note to the top of the notes list",
        &[("note", true, "name of the note")],
    ),
    (
        App::Notes,
        "get_notes_in_folder",
        "list the notes stored in a folder",
        &[("folder", true, "name of the folder")],
    ),
    (
        App::Notes,
        "get_recent_notes",
        "list recently edited notes",
        &[],
    ),
    // phonecall: 8
    (
        App::Phonecall,
        "call_contact",
        "start a phone call to a contact",
        &[("contact", true, "who to call")],
    ),
    (
        App::Phonecall,
        "call_back_missed",
        "return a missed phone call from a contact",
        &[("contact", true, "who called")],
    ),
    (
        App::Phonecall,
        "get_call_history",
        "list recent incoming and outgoing phone calls",
        &[],
    ),
    (
        App::Phonecall,
        "get_missed_calls",
        "list missed phone calls",
        &[],
    ),
    (
        App::Phonecall,
        "call_number",
        "dial a phone number",
        &[("phone_number", true, "number to dial")],
    ),
    (
        App::Phonecall,
        "block_contact",
        "block phone calls from a contact",
        &[("contact", true, "who to block")],
    ),
    (
        App::Phonecall,
        "add_contact",
        "save a new contact with a phone number",
        &[("contact", true, "name"), ("phone_number", true, "number")],
    ),
    (
        App::Phonecall,
        "get_call_duration",
        "show how long the last phone call with a contact lasted",
        &[("contact", true, "who was called")],
    ),
];

fn app_label(app: App) -> &'static str {
    match app {
        App::Mail => "Mail",
        App::Calendar => "Calendar",
        App::Google => "Google",
        App::Music => "Music",
        App::Reminders => "Reminders",
        App::Notes => "Notes",
        App::Phonecall => "PhoneCall",
    }
}

/// The toolbox, ordered by app then declaration order.
pub fn default_toolbox() -> Vec<Tool> {
    SPECS
        .iter()
        .map(|&(app, name, what, params)| Tool {
            name: String::from(name),
            app,
            description: format!("{} App's {name} API is used to {what}", app_label(app)),
            params: params
                .iter()
                .map(|&(p, required, d)| ToolParam {
                    name: String::from(p),
                    description: String::from(d),
                    required,
                })
                .collect(),
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use alloc::collections::{BTreeMap, BTreeSet};

    #[test]
    fn per_app_counts() {
        let tb = default_toolbox();
        assert_eq!(tb.len(), 59);
        let mut counts: BTreeMap<App, usize> = BTreeMap::new();
        for t in &tb {
            *counts.entry(t.app).or_default() += 1;
        }
        assert_eq!(counts[&App::Music], 11);
        assert_eq!(counts[&App::Google], 10);
        assert_eq!(counts[&App::Notes], 9);
        assert_eq!(counts[&App::Mail], 8);
        assert_eq!(counts[&App::Phonecall], 8);
        assert_eq!(counts[&App::Calendar], 7);
        assert_eq!(counts[&App::Reminders], 6);
    }

    #[test]
    fn names_unique_and_required_first() {
        let tb = default_toolbox();
        let names: BTreeSet<_> = tb.iter().map(|t| t.name.as_str()).collect();
        assert_eq!(names.len(), tb.len());
        for t in &tb {
            let first_optional = t.params.iter().position(|p| !p.required);
            if let Some(i) = first_optional {
                assert!(t.params[i..].iter().all(|p| !p.required), "{}", t.name);
            }
        }
    }
}
