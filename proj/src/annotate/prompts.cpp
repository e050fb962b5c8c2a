// Rubric prompts, verbatim. {task} is replaced with the task text.

#include "annotate/prompts.hpp"

namespace aix::annotate::detail {

const char* const kHowPrompt = R"prompt(TASK: "{task}" Please label the given task according to the taxonomy below. ## T -- Interactive Label tasks T if the given task is performed in collaboration with others and involves either alignment or co-creation. ## D -- Independent Label tasks D if the given task requires minimal to low levels of coordination with others, even if work product later needs to integrate with work of others. Please write a response in json file format like below: "Task": "Analyzing data","Label of How (T/D)": "D","Explanation": "Data analysis often involves personal tasks like processing datasets, performing statistical tests, and interpreting results, which can be done autonomously if the analyst possesses the necessary skills and information. This independence is facilitated by the nature of the work, which largely involves interacting with data through software and requires concentrated individual effort. Additionally, advancements in data analysis tools and software have made it easier for individuals to manage and analyze large amounts of data efficiently on their own. Thus, while collaboration can enhance aspects of data analysis, especially in complex projects or interdisciplinary fields, much of the analytical work can be effectively conducted independently." "Task": "Investigate and evaluate union complaints or arguments to determine viability","Label of How (T/D)": "T","Explanation": "Investigating and evaluating union complaints or arguments to determine their viability is a task that predominantly requires collaboration and interaction, although it incorporates some independent elements. This role involves engaging with multiple stakeholders such as union representatives, employees, and management to understand each group's perspective. Information gathering might involve independent research, but it frequently necessitates interviews and discussions with involved parties to grasp the full context of each complaint. Additionally, the task often requires coordination with legal advisors and human resources to ensure compliance with legal standards and organizational policies. If mediation is involved, the role distinctly relies on strong interpersonal skills to manage and reconcile differing viewpoints, underscoring the collaborative nature of the task." Once again, please make sure that the response is in json format.)prompt";

const char* const kRepetitivenessPrompt = R"prompt(TASK: "{task}" Please label the given task according to the taxonomy below. ## R -- Repetitive Label tasks R if the task involves performing the same standardized procedures of operations consistently, with little variation over time. ## V -- Variable Label tasks D if the task involves frequent changes in procedures, requiring adaptability and decision-making based on unique circumstances each time. Please write a response in json file format like below: "Task": "assembling components onto a circuit board","Label of Repetitiveness (R/V)": "R", "Explanation": "This task involves placing specific electronic components like resistors, capacitors, and integrated circuits in designated spots on the circuit board and soldering them into place. The task is repeated with each circuit board, following a precise pattern and methodology to ensure consistency and functionality of the final product. Each step is standardized and repeated for multiple units, making the process highly repetitive." "Task": "Investigate and evaluate union complaints or arguments to determine viability","Label of Repetitiveness (R/V)": "V","Explanation": T"he task of investigating and evaluating union complaints or arguments to determine their viability is an example of variable work. This role involves understanding the specific details of each complaint, which can vary widely in nature, context, and seriousness. The process requires analyzing documentation, interviewing involved parties, interpreting labor laws and agreements, and applying these to the unique circumstances of each case. The variability in the tasks arises from the need to adapt approaches based on different legal frameworks, workplace policies, and the specifics of each complaint, necessitating significant human judgment and adaptability." Once again, please make sure that the response is in json format.)prompt";

const char* const kNaturePrompt = R"prompt(TASK: "{task}"

Please label the given task according to the taxonomy below by choosing one option from the annotations provided.

## P -- Physical
Label tasks P if the task involves bodily movement, physical exertion, and the use of physical skills or strength. 

## M -- Mental
Label tasks M if the task involves cognitive activities that require thinking, problem-solving, decision-making, and the use of intellectual skills. Please write a response in json file format like below:

Task: Building a wooden chair
Label of Nature (P/M): P
Explanation: This task involves physical activities such as cutting, sanding, and assembling pieces of wood using tools. It requires manual labor and physical exertion to shape and join the wood pieces into a finished chair.

Task: Analyzing sales data to identify trends
Label of Nature (P/M): M
Explanation: This task involves cognitive activities such as collecting data, performing statistical analyses, interpreting results, and making decisions based on the findings. It requires intellectual skills and problem-solving abilities to understand and analyze the sales data.

Once again, please make sure that the response is in json format.)prompt";

}  // namespace aix::annotate::detail
